//! Query execution and CSV emission.
//!
//! One row is printed per (query, root); queries that fail produce a
//! single row whose `status` names the failure instead of aborting the
//! whole run. Output ordering is deterministic: query id order, then
//! roots by lexicographic (Re μ, Im μ). All numbers are printed with 12
//! significant digits; complex cells hold `re,im` pairs and are quoted
//! per RFC 4180 because of the embedded comma.

use std::io::Write;

use catoptrics::{
    char_t, char_v, char_w, chordal, dir_to_xi, domain_t, domain_v, domain_w, eta_r_of_point,
    line_from_point_xi, oracle_t, oracle_v, oracle_w, reflect_direction, reflect_line, xi_to_dir,
    CharQueryT, CharQueryV, CharQueryW, CharacteristicResult, ComplexD, Error, MirrorSurfaceD,
    Point3, SolveOptionsD, CHART_CAP,
};

use crate::scene::{ChartInput, Query, Scene};

/// Command-line overrides; they win over the `[options]` section.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub verify: bool,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
}

#[derive(Debug, Default)]
pub struct RunReport {
    pub solver_failures: usize,
}

/// Formats with 12 significant digits, plain notation for moderate
/// exponents and scientific otherwise, trailing zeros trimmed. `-0`
/// collapses to `0` so equal values always print identically.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let mut s = if (-5..12).contains(&exp) {
        format!("{x:.prec$}", prec = (11 - exp).max(0) as usize)
    } else {
        format!("{x:.11e}")
    };
    let mantissa_end = s.find('e').unwrap_or(s.len());
    if s[..mantissa_end].contains('.') {
        let tail = s.split_off(mantissa_end);
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
        s.push_str(&tail);
    }
    s
}

fn fmt_complex(z: ComplexD) -> String {
    format!("{},{}", fmt_g(z.re), fmt_g(z.im))
}

/// RFC-4180 quoting: fields with commas, quotes, or line breaks are
/// wrapped in double quotes with inner quotes doubled.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Clone, Debug, Default)]
struct Row {
    status: &'static str,
    value: Option<f64>,
    mu: Option<ComplexD>,
    xi0: Option<ComplexD>,
    xi1: Option<ComplexD>,
    xi2: Option<ComplexD>,
    s1: Option<f64>,
    s2: Option<f64>,
    r1: Option<f64>,
    r2: Option<f64>,
    residual: Option<f64>,
    oracle: Option<f64>,
    delta: Option<f64>,
}

impl Row {
    fn ok() -> Self {
        Row { status: "ok", ..Row::default() }
    }
}

fn status_of(err: &Error) -> &'static str {
    match err {
        Error::ChartExcluded => "chart-excluded",
        Error::DegenerateInput(_) => "degenerate-input",
        Error::NotIncident => "not-incident",
        Error::OutOfDomain => "out-of-domain",
        Error::SolverFailure { .. } => "solver-failure",
    }
}

fn resolve(input: ChartInput) -> Result<ComplexD, Error> {
    match input {
        ChartInput::Xi(xi) => {
            if xi.norm() > CHART_CAP {
                Err(Error::ChartExcluded)
            } else {
                Ok(xi)
            }
        }
        ChartInput::Dir(d) => dir_to_xi(d),
    }
}

fn solve_options(scene: &Scene, overrides: &Overrides) -> SolveOptionsD {
    let mut opts = SolveOptionsD::default();
    let apply_tol = |opts: &mut SolveOptionsD, tol: f64| {
        opts.accept_tol = tol;
        opts.target_tol = tol.min(SolveOptionsD::default().target_tol);
    };
    if let Some(grid) = scene.options.grid {
        opts.grid = grid;
    }
    if let Some(tol) = scene.options.tol {
        apply_tol(&mut opts, tol);
    }
    if let Some(grid) = overrides.grid {
        opts.grid = grid;
    }
    if let Some(tol) = overrides.tol {
        apply_tol(&mut opts, tol);
    }
    opts
}

fn sort_rows(rows: &mut [Row]) {
    rows.sort_by(|a, b| {
        let key = |r: &Row| {
            let mu = r.mu.unwrap_or_default();
            (mu.re, mu.im)
        };
        key(a).partial_cmp(&key(b)).expect("finite ordering keys")
    });
}

/// Attaches oracle values to result rows by nearest-μ match.
fn attach_oracle(rows: &mut [Row], oracle: &[(ComplexD, f64)]) {
    for row in rows.iter_mut() {
        let Some(mu) = row.mu else { continue };
        let Some((_, value)) = oracle
            .iter()
            .find(|(omu, _)| (omu - mu).norm() < 1e-5)
        else {
            continue;
        };
        row.oracle = Some(*value);
        row.delta = row.value.map(|v| (v - value).abs());
    }
}

fn char_rows(results: &[CharacteristicResult<f64>]) -> Vec<Row> {
    results
        .iter()
        .map(|r| Row {
            value: Some(r.value),
            mu: Some(r.mu),
            xi0: Some(r.xi0),
            xi1: Some(r.xi1),
            xi2: Some(r.xi2),
            s1: r.s1,
            s2: r.s2,
            r1: Some(r.r1),
            r2: Some(r.r2),
            residual: Some(r.residual),
            ..Row::ok()
        })
        .collect()
}

fn run_query(
    surface: &MirrorSurfaceD,
    query: &Query,
    opts: &SolveOptionsD,
    verify: bool,
) -> Result<Vec<Row>, Error> {
    let rows = match *query {
        Query::Convert { input, p } => {
            let xi = resolve(input)?;
            let round = dir_to_xi(xi_to_dir(xi))?;
            let mut row = Row {
                xi0: Some(xi),
                residual: Some(chordal(xi, round)),
                ..Row::ok()
            };
            if let Some(p) = p {
                let (eta, r) = eta_r_of_point(xi, Point3::from_vec3(p));
                row.xi1 = Some(eta);
                row.r1 = Some(r);
            }
            vec![row]
        }
        Query::Reflect { mu, incident, p } => {
            let frame = surface.frame_at(mu)?;
            let xi1 = resolve(incident)?;
            let through = match p {
                Some(p) => Point3::from_vec3(p),
                None => frame.foot,
            };
            let (line, r1) = line_from_point_xi(xi1, through)?;
            let event = reflect_line(&frame, &line, r1)?;
            let xi2 = event.outgoing.xi();
            let involution = reflect_direction(frame.xi0, xi2)
                .map(|back| chordal(back, xi1))
                .ok();
            vec![Row {
                mu: Some(mu),
                xi0: Some(frame.xi0),
                xi1: Some(xi1),
                xi2: Some(xi2),
                r1: Some(r1),
                r2: Some(event.r2),
                residual: involution,
                ..Row::ok()
            }]
        }
        Query::DomainT { xi1, xi2 } => {
            let xi1 = resolve(xi1)?;
            let xi2 = resolve(xi2)?;
            let frames = domain_t(surface, CharQueryT { xi1, xi2 }, opts)?;
            frames
                .iter()
                .map(|f| Row {
                    mu: Some(f.mu),
                    xi0: Some(f.xi0),
                    xi1: Some(xi1),
                    xi2: Some(xi2),
                    residual: reflect_direction(f.xi0, xi1)
                        .map(|out| chordal(out, xi2))
                        .ok(),
                    ..Row::ok()
                })
                .collect()
        }
        Query::DomainW { p1, xi2 } => {
            let xi2 = resolve(xi2)?;
            let roots = domain_w(
                surface,
                CharQueryW { p1: Point3::from_vec3(p1), xi2 },
                opts,
            )?;
            roots
                .iter()
                .map(|root| Row {
                    mu: Some(root.frame.mu),
                    xi0: Some(root.frame.xi0),
                    xi1: Some(root.xi1),
                    xi2: Some(xi2),
                    residual: Some(root.residual),
                    ..Row::ok()
                })
                .collect()
        }
        Query::DomainV { p1, p2 } => {
            let roots = domain_v(
                surface,
                CharQueryV {
                    p1: Point3::from_vec3(p1),
                    p2: Point3::from_vec3(p2),
                },
                opts,
            )?;
            roots
                .iter()
                .map(|root| Row {
                    mu: Some(root.frame.mu),
                    xi0: Some(root.frame.xi0),
                    xi1: Some(root.xi1),
                    xi2: reflect_direction(root.frame.xi0, root.xi1).ok(),
                    residual: Some(root.residual),
                    ..Row::ok()
                })
                .collect()
        }
        Query::CharT { xi1, xi2 } => {
            let xi1 = resolve(xi1)?;
            let xi2 = resolve(xi2)?;
            let results = char_t(surface, CharQueryT { xi1, xi2 }, opts)?;
            let mut rows = char_rows(&results);
            if verify {
                match oracle_t(surface, xi_to_dir(xi1), xi_to_dir(xi2), opts) {
                    Ok(stations) => {
                        let pairs: Vec<(ComplexD, f64)> =
                            stations.iter().map(|s| (s.mu, s.value)).collect();
                        attach_oracle(&mut rows, &pairs);
                    }
                    Err(err) => eprintln!("verify: angle oracle failed: {err}"),
                }
            }
            rows
        }
        Query::CharW { p1, xi2 } => {
            let xi2 = resolve(xi2)?;
            let results = char_w(
                surface,
                CharQueryW { p1: Point3::from_vec3(p1), xi2 },
                opts,
            )?;
            let mut rows = char_rows(&results);
            if verify {
                match oracle_w(surface, p1, xi_to_dir(xi2), opts) {
                    Ok(paths) => {
                        let pairs: Vec<(ComplexD, f64)> =
                            paths.iter().map(|p| (p.mu, p.value)).collect();
                        attach_oracle(&mut rows, &pairs);
                    }
                    Err(err) => eprintln!("verify: mixed oracle failed: {err}"),
                }
            }
            rows
        }
        Query::CharV { p1, p2 } => {
            let results = char_v(
                surface,
                CharQueryV {
                    p1: Point3::from_vec3(p1),
                    p2: Point3::from_vec3(p2),
                },
                opts,
            )?;
            let mut rows = char_rows(&results);
            if verify {
                match oracle_v(surface, p1, p2, opts) {
                    Ok(paths) => {
                        let pairs: Vec<(ComplexD, f64)> =
                            paths.iter().map(|p| (p.mu, p.value)).collect();
                        attach_oracle(&mut rows, &pairs);
                    }
                    Err(err) => eprintln!("verify: point oracle failed: {err}"),
                }
            }
            rows
        }
    };
    Ok(rows)
}

fn write_row(out: &mut impl Write, id: u64, function: &str, row: &Row, verify: bool) {
    let complex = |c: Option<ComplexD>| c.map(fmt_complex).unwrap_or_default();
    let real = |x: Option<f64>| x.map(fmt_g).unwrap_or_default();
    let mut fields = vec![
        id.to_string(),
        function.to_string(),
        row.status.to_string(),
        real(row.value),
        complex(row.mu),
        complex(row.xi0),
        complex(row.xi1),
        complex(row.xi2),
        real(row.s1),
        real(row.s2),
        real(row.r1),
        real(row.r2),
        real(row.residual),
    ];
    if verify {
        fields.push(real(row.oracle));
        fields.push(real(row.delta));
    }
    let line: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
    writeln!(out, "{}", line.join(",")).expect("write CSV row");
}

pub fn run_scene(scene: &Scene, overrides: &Overrides, out: &mut impl Write) -> RunReport {
    let opts = solve_options(scene, overrides);
    let verify = scene.options.verify || overrides.verify;
    let mut header = "query,function,status,value,mu,xi0,xi1,xi2,s1,s2,r1,r2,residual".to_string();
    if verify {
        header.push_str(",oracle,delta");
    }
    writeln!(out, "{header}").expect("write CSV header");
    let mut report = RunReport::default();
    for (id, query) in &scene.queries {
        match run_query(&scene.surface, query, &opts, verify) {
            Ok(mut rows) => {
                if rows.is_empty() {
                    write_row(out, *id, query.function(), &Row {
                        status: "empty-domain",
                        ..Row::default()
                    }, verify);
                } else {
                    sort_rows(&mut rows);
                    for row in &rows {
                        write_row(out, *id, query.function(), row, verify);
                    }
                }
            }
            Err(err) => {
                if matches!(err, Error::SolverFailure { .. }) {
                    report.solver_failures += 1;
                }
                eprintln!("query {id}: {err}");
                write_row(out, *id, query.function(), &Row {
                    status: status_of(&err),
                    ..Row::default()
                }, verify);
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::parse_scene;

    fn run_to_string(text: &str, overrides: &Overrides) -> (String, RunReport) {
        let scene = parse_scene(text).unwrap();
        let mut buf = Vec::new();
        let report = run_scene(&scene, overrides, &mut buf);
        (String::from_utf8(buf).unwrap(), report)
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(-0.0), "0");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(-2.5), "-2.5");
        assert_eq!(fmt_g(2.0 * 2.0f64.sqrt()), "2.82842712475");
        assert_eq!(fmt_g(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_g(1e-10), "1e-10");
        assert_eq!(fmt_g(-1.23e15), "-1.23e15");
        assert_eq!(fmt_g(1234.5), "1234.5");
    }

    #[test]
    fn quoting_wraps_embedded_commas() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("1,2"), "\"1,2\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn plane_point_query_prints_the_classic_value() {
        let text = "\
[surface]
kind = plane
normal = 0,0,1

[query.1]
kind = char_V
p1 = 0,0,1
p2 = 2,0,1
";
        let (csv, report) = run_to_string(text, &Overrides::default());
        assert_eq!(report.solver_failures, 0);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("query,function,status,value,mu"));
        let row = lines[1];
        assert!(row.starts_with("1,char_V,ok,2.8284271247"), "row: {row}");
    }

    #[test]
    fn verify_appends_oracle_columns() {
        let text = "\
[surface]
kind = plane
normal = 0,0,1

[query.1]
kind = char_V
p1 = 0,0,1
p2 = 2,0,1
";
        let (csv, _) = run_to_string(text, &Overrides { verify: true, ..Overrides::default() });
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].ends_with(",oracle,delta"));
        // The delta is the final field and real-valued, hence unquoted.
        let delta: f64 = lines[1].rsplit(',').next().unwrap().parse().unwrap();
        assert!(delta < 1e-9, "delta {delta}");
    }

    #[test]
    fn out_of_reach_angle_query_reports_empty_domain() {
        // A paraboloid's Gauss image stays near its axis: an angle query
        // whose mirror normal would need to be horizontal has no
        // stations, which is a success with an empty-domain row.
        let text = "\
[surface]
kind = paraboloid
axis = 0,0,1
focal = 1
domain = -2,2,-2,2

[query.3]
kind = char_T
dir1 = 0,0,1
dir2 = 0,0.6,0.8
";
        let (csv, report) = run_to_string(text, &Overrides::default());
        assert_eq!(report.solver_failures, 0);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], "3,char_T,empty-domain,,,,,,,,,,");
    }

    #[test]
    fn chart_cap_rejections_become_error_rows() {
        let text = "\
[surface]
kind = plane
normal = 0,0,1

[query.1]
kind = convert
dir = 0,0,-1
";
        let (csv, report) = run_to_string(text, &Overrides::default());
        assert_eq!(report.solver_failures, 0);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[1], "1,convert,chart-excluded,,,,,,,,,,");
    }

    #[test]
    fn identical_runs_are_byte_identical() {
        let text = "\
[surface]
kind = sphere
radius = 1

[query.1]
kind = char_V
p1 = 2,0,0
p2 = 2,0,0

[query.2]
kind = char_T
dir1 = 0,0,1
dir2 = 1,0,0
";
        let (a, _) = run_to_string(text, &Overrides::default());
        let (b, _) = run_to_string(text, &Overrides::default());
        assert_eq!(a, b);
        assert!(a.lines().count() > 2);
    }

    #[test]
    fn conversion_rows_carry_incidence_data() {
        let text = "\
[surface]
kind = plane
normal = 0,0,1

[query.1]
kind = convert
dir = 0.707106781187,0,-0.707106781187
p = 1,0,0
";
        let (csv, _) = run_to_string(text, &Overrides::default());
        let lines: Vec<&str> = csv.lines().collect();
        // xi0 = sqrt(2)+1 for the 45-degree downhill direction, and the
        // affine parameter of (1,0,0) along it is 1/sqrt(2).
        assert!(lines[1].contains("2.41421356237"), "row: {}", lines[1]);
        assert!(lines[1].contains("0.707106781187"), "row: {}", lines[1]);
    }

    #[test]
    fn reflect_rows_report_the_outgoing_chart() {
        let text = "\
[surface]
kind = plane
normal = 0,0,1

[query.1]
kind = reflect
mu = 0,0
xi1 = 2,0
";
        let (csv, _) = run_to_string(text, &Overrides::default());
        let lines: Vec<&str> = csv.lines().collect();
        // Plane at t=0: xi2 = 1/conj(xi1) = 0.5.
        assert!(lines[1].contains("\"0.5,0\""), "row: {}", lines[1]);
    }
}
