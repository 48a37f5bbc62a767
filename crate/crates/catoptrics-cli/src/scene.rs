//! Line-oriented scene-file parser.
//!
//! A scene is UTF-8 text made of sections. `[surface]` (required, once)
//! describes the mirror patch, `[options]` (optional) sets solver knobs,
//! and each `[query.N]` adds one numbered query. Inside a section every
//! non-blank line is `key = value`; `#` starts a comment. Complex values
//! are `re,im` pairs, points and directions are `x,y,z` triples, and the
//! parameter rectangle is `re_min,re_max,im_min,im_max`. Unknown keys,
//! duplicate keys, and malformed values are rejected with the offending
//! line number.

use std::collections::BTreeMap;
use std::fmt;

use catoptrics::surfaces::Orientation;
use catoptrics::{ComplexD, MirrorSurfaceD, ParamRectD, Vec3D};

/// A scene-file rejection, pointing at the line that caused it.
#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

/// A direction given either as a chart value or as a vector; vector form
/// is converted at query time so chart-cap rejections surface as query
/// statuses, not parse failures.
#[derive(Clone, Copy, Debug)]
pub enum ChartInput {
    Xi(ComplexD),
    Dir(Vec3D),
}

#[derive(Clone, Copy, Debug)]
pub enum Query {
    Convert { input: ChartInput, p: Option<Vec3D> },
    Reflect { mu: ComplexD, incident: ChartInput, p: Option<Vec3D> },
    DomainT { xi1: ChartInput, xi2: ChartInput },
    DomainW { p1: Vec3D, xi2: ChartInput },
    DomainV { p1: Vec3D, p2: Vec3D },
    CharT { xi1: ChartInput, xi2: ChartInput },
    CharW { p1: Vec3D, xi2: ChartInput },
    CharV { p1: Vec3D, p2: Vec3D },
}

impl Query {
    /// The name printed in the CSV `function` column.
    pub fn function(&self) -> &'static str {
        match self {
            Query::Convert { .. } => "convert",
            Query::Reflect { .. } => "reflect",
            Query::DomainT { .. } => "domain_T",
            Query::DomainW { .. } => "domain_W",
            Query::DomainV { .. } => "domain_V",
            Query::CharT { .. } => "char_T",
            Query::CharW { .. } => "char_W",
            Query::CharV { .. } => "char_V",
        }
    }
}

/// Solver knobs from the `[options]` section; command-line flags win.
#[derive(Clone, Copy, Debug, Default)]
pub struct SceneOptions {
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub verify: bool,
}

#[derive(Debug)]
pub struct Scene {
    pub surface: MirrorSurfaceD,
    pub options: SceneOptions,
    pub queries: Vec<(u64, Query)>,
}

/// One parsed `key = value` with its source line.
struct Entry {
    line: usize,
    value: String,
    used: bool,
}

struct Section {
    header_line: usize,
    entries: BTreeMap<String, Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.get_mut(key).map(|e| {
            e.used = true;
            (e.line, e.value.clone())
        })
    }

    /// Every key must have been consumed by a `take`; complain about the
    /// first leftover in line order.
    fn reject_unknown(&self, what: &str) -> Result<(), ParseError> {
        let mut leftovers: Vec<(&usize, &String)> = self
            .entries
            .iter()
            .filter(|(_, e)| !e.used)
            .map(|(k, e)| (&e.line, k))
            .collect();
        leftovers.sort();
        match leftovers.first() {
            Some((line, key)) => err(**line, format!("unknown {what} key `{key}`")),
            None => Ok(()),
        }
    }
}

fn split_sections(text: &str) -> Result<Vec<(String, Section)>, ParseError> {
    let mut sections: Vec<(String, Section)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return err(line_no, "unterminated section header");
            };
            sections.push((
                name.trim().to_string(),
                Section { header_line: line_no, entries: BTreeMap::new() },
            ));
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(line_no, "expected `key = value` or a `[section]` header");
        };
        let Some((_, section)) = sections.last_mut() else {
            return err(line_no, "content before the first section header");
        };
        let key = key.trim().to_string();
        if key.is_empty() {
            return err(line_no, "empty key");
        }
        let entry = Entry { line: line_no, value: value.trim().to_string(), used: false };
        if section.entries.insert(key.clone(), entry).is_some() {
            return err(line_no, format!("duplicate key `{key}`"));
        }
    }
    Ok(sections)
}

fn parse_real(line: usize, key: &str, value: &str) -> Result<f64, ParseError> {
    match value.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => err(line, format!("`{key}` expects a finite number, got `{value}`")),
    }
}

fn parse_parts(line: usize, key: &str, value: &str, n: usize) -> Result<Vec<f64>, ParseError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != n {
        return err(
            line,
            format!("`{key}` expects {n} comma-separated numbers, got `{value}`"),
        );
    }
    parts.iter().map(|p| parse_real(line, key, p)).collect()
}

fn parse_complex(line: usize, key: &str, value: &str) -> Result<ComplexD, ParseError> {
    let v = parse_parts(line, key, value, 2)?;
    Ok(ComplexD::new(v[0], v[1]))
}

fn parse_triple(line: usize, key: &str, value: &str) -> Result<Vec3D, ParseError> {
    let v = parse_parts(line, key, value, 3)?;
    Ok(Vec3D::new(v[0], v[1], v[2]))
}

/// Direction triples are normalized here so users can write `1,1,1`; a
/// zero vector has no direction and is rejected.
fn parse_direction(line: usize, key: &str, value: &str) -> Result<Vec3D, ParseError> {
    let v = parse_triple(line, key, value)?;
    if v.norm() < 1e-12 {
        return err(line, format!("`{key}` must be a nonzero vector"));
    }
    Ok(v.normalized())
}

fn parse_rect(line: usize, key: &str, value: &str) -> Result<ParamRectD, ParseError> {
    let v = parse_parts(line, key, value, 4)?;
    match ParamRectD::new(v[0], v[1], v[2], v[3]) {
        Ok(rect) => Ok(rect),
        Err(e) => err(line, format!("`{key}`: {e}")),
    }
}

fn parse_orientation(line: usize, value: &str) -> Result<Orientation, ParseError> {
    match value {
        "outward" => Ok(Orientation::Outward),
        "inward" => Ok(Orientation::Inward),
        _ => err(line, format!("`orientation` must be `outward` or `inward`, got `{value}`")),
    }
}

/// One of two mutually exclusive keys: a chart value or a direction.
fn chart_input(
    section: &mut Section,
    xi_key: &str,
    dir_key: &str,
) -> Result<Option<ChartInput>, ParseError> {
    let xi = section.take(xi_key);
    let dir = section.take(dir_key);
    match (xi, dir) {
        (Some((line, _)), Some(_)) => {
            err(line, format!("`{xi_key}` and `{dir_key}` are mutually exclusive"))
        }
        (Some((line, value)), None) => {
            Ok(Some(ChartInput::Xi(parse_complex(line, xi_key, &value)?)))
        }
        (None, Some((line, value))) => {
            Ok(Some(ChartInput::Dir(parse_direction(line, dir_key, &value)?)))
        }
        (None, None) => Ok(None),
    }
}

fn require<T>(header_line: usize, got: Option<T>, what: &str) -> Result<T, ParseError> {
    match got {
        Some(v) => Ok(v),
        None => err(header_line, format!("missing {what}")),
    }
}

fn build_surface(section: &mut Section) -> Result<MirrorSurfaceD, ParseError> {
    let (kind_line, kind) = require(section.header_line, section.take("kind"), "`kind`")?;
    let lift = |r: catoptrics::Result<MirrorSurfaceD>| match r {
        Ok(s) => Ok(s),
        Err(e) => err(kind_line, e.to_string()),
    };
    let surface = match kind.as_str() {
        "plane" => {
            let base = match section.take("base") {
                Some((l, v)) => parse_triple(l, "base", &v)?,
                None => Vec3D::zero(),
            };
            let (l, v) = require(section.header_line, section.take("normal"), "`normal`")?;
            let normal = parse_direction(l, "normal", &v)?;
            let domain = rect_or_default(section, 8.0)?;
            lift(MirrorSurfaceD::plane(base, normal, domain))?
        }
        "sphere" => {
            let center = match section.take("center") {
                Some((l, v)) => parse_triple(l, "center", &v)?,
                None => Vec3D::zero(),
            };
            let (l, v) = require(section.header_line, section.take("radius"), "`radius`")?;
            let radius = parse_real(l, "radius", &v)?;
            let orientation = orientation_or_default(section)?;
            let domain = rect_or_default(section, 4.0)?;
            lift(MirrorSurfaceD::sphere(center, radius, orientation, domain))?
        }
        "paraboloid" => {
            let vertex = match section.take("vertex") {
                Some((l, v)) => parse_triple(l, "vertex", &v)?,
                None => Vec3D::zero(),
            };
            let (l, v) = require(section.header_line, section.take("axis"), "`axis`")?;
            let axis = parse_direction(l, "axis", &v)?;
            let (l, v) = require(section.header_line, section.take("focal"), "`focal`")?;
            let focal = parse_real(l, "focal", &v)?;
            let orientation = orientation_or_default(section)?;
            let domain = rect_or_default(section, 8.0)?;
            lift(MirrorSurfaceD::paraboloid(vertex, axis, focal, orientation, domain))?
        }
        "ellipsoid" => {
            let center = match section.take("center") {
                Some((l, v)) => parse_triple(l, "center", &v)?,
                None => Vec3D::zero(),
            };
            let (l, v) = require(section.header_line, section.take("semi"), "`semi`")?;
            let semi = parse_parts(l, "semi", &v, 3)?;
            let orientation = orientation_or_default(section)?;
            let domain = rect_or_default(section, 4.0)?;
            lift(MirrorSurfaceD::ellipsoid(
                center,
                [semi[0], semi[1], semi[2]],
                orientation,
                domain,
            ))?
        }
        other => {
            return err(
                kind_line,
                format!("unknown surface kind `{other}` (plane, sphere, paraboloid, ellipsoid)"),
            )
        }
    };
    section.reject_unknown("surface")?;
    Ok(surface)
}

fn rect_or_default(section: &mut Section, half: f64) -> Result<ParamRectD, ParseError> {
    match section.take("domain") {
        Some((l, v)) => parse_rect(l, "domain", &v),
        None => Ok(ParamRectD::square(half).expect("default rectangle")),
    }
}

fn orientation_or_default(section: &mut Section) -> Result<Orientation, ParseError> {
    match section.take("orientation") {
        Some((l, v)) => parse_orientation(l, &v),
        None => Ok(Orientation::Outward),
    }
}

fn build_options(section: &mut Section) -> Result<SceneOptions, ParseError> {
    let mut opts = SceneOptions::default();
    if let Some((l, v)) = section.take("grid") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => opts.grid = Some(n),
            _ => return err(l, format!("`grid` expects a positive integer, got `{v}`")),
        }
    }
    if let Some((l, v)) = section.take("tol") {
        let tol = parse_real(l, "tol", &v)?;
        if !(tol > 0.0) {
            return err(l, "`tol` must be positive");
        }
        opts.tol = Some(tol);
    }
    if let Some((l, v)) = section.take("verify") {
        match v.as_str() {
            "true" => opts.verify = true,
            "false" => opts.verify = false,
            _ => return err(l, format!("`verify` expects `true` or `false`, got `{v}`")),
        }
    }
    section.reject_unknown("options")?;
    Ok(opts)
}

fn build_query(section: &mut Section) -> Result<Query, ParseError> {
    let (kind_line, kind) = require(section.header_line, section.take("kind"), "`kind`")?;
    let point = |section: &mut Section, key: &str| -> Result<Option<Vec3D>, ParseError> {
        section
            .take(key)
            .map(|(l, v)| parse_triple(l, key, &v))
            .transpose()
    };
    let query = match kind.as_str() {
        "convert" => {
            let input = chart_input(section, "xi", "dir")?;
            let input = require(section.header_line, input, "`xi` or `dir`")?;
            let p = point(section, "p")?;
            Query::Convert { input, p }
        }
        "reflect" => {
            let (l, v) = require(section.header_line, section.take("mu"), "`mu`")?;
            let mu = parse_complex(l, "mu", &v)?;
            let incident = chart_input(section, "xi1", "dir1")?;
            let incident = require(section.header_line, incident, "`xi1` or `dir1`")?;
            let p = point(section, "p")?;
            Query::Reflect { mu, incident, p }
        }
        "domain_T" | "char_T" => {
            let xi1 = chart_input(section, "xi1", "dir1")?;
            let xi1 = require(section.header_line, xi1, "`xi1` or `dir1`")?;
            let xi2 = chart_input(section, "xi2", "dir2")?;
            let xi2 = require(section.header_line, xi2, "`xi2` or `dir2`")?;
            if kind == "domain_T" {
                Query::DomainT { xi1, xi2 }
            } else {
                Query::CharT { xi1, xi2 }
            }
        }
        "domain_W" | "char_W" => {
            let p1 = require(section.header_line, point(section, "p1")?, "`p1`")?;
            let xi2 = chart_input(section, "xi2", "dir2")?;
            let xi2 = require(section.header_line, xi2, "`xi2` or `dir2`")?;
            if kind == "domain_W" {
                Query::DomainW { p1, xi2 }
            } else {
                Query::CharW { p1, xi2 }
            }
        }
        "domain_V" | "char_V" => {
            let p1 = require(section.header_line, point(section, "p1")?, "`p1`")?;
            let p2 = require(section.header_line, point(section, "p2")?, "`p2`")?;
            if kind == "domain_V" {
                Query::DomainV { p1, p2 }
            } else {
                Query::CharV { p1, p2 }
            }
        }
        other => {
            return err(
                kind_line,
                format!(
                    "unknown query kind `{other}` (convert, reflect, \
                     domain_T, domain_W, domain_V, char_T, char_W, char_V)"
                ),
            )
        }
    };
    section.reject_unknown("query")?;
    Ok(query)
}

pub fn parse_scene(text: &str) -> Result<Scene, ParseError> {
    let sections = split_sections(text)?;
    let mut surface: Option<MirrorSurfaceD> = None;
    let mut options = SceneOptions::default();
    let mut seen_options = false;
    let mut queries: Vec<(u64, Query)> = Vec::new();
    for (name, mut section) in sections {
        match name.as_str() {
            "surface" => {
                if surface.is_some() {
                    return err(section.header_line, "second [surface] section");
                }
                surface = Some(build_surface(&mut section)?);
            }
            "options" => {
                if seen_options {
                    return err(section.header_line, "second [options] section");
                }
                seen_options = true;
                options = build_options(&mut section)?;
            }
            other => {
                let Some(id) = other.strip_prefix("query.") else {
                    return err(section.header_line, format!("unknown section [{other}]"));
                };
                let Ok(id) = id.parse::<u64>() else {
                    return err(
                        section.header_line,
                        format!("query id `{id}` is not an unsigned integer"),
                    );
                };
                if queries.iter().any(|(seen, _)| *seen == id) {
                    return err(section.header_line, format!("duplicate query id {id}"));
                }
                queries.push((id, build_query(&mut section)?));
            }
        }
    }
    let Some(surface) = surface else {
        return err(1, "missing [surface] section");
    };
    queries.sort_by_key(|(id, _)| *id);
    Ok(Scene { surface, options, queries })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[surface]
kind = plane
normal = 0,0,1

[query.1]
kind = char_V
p1 = 0,0,1
p2 = 2,0,1
";

    #[test]
    fn minimal_plane_scene_parses() {
        let scene = parse_scene(MINIMAL).unwrap();
        assert_eq!(scene.queries.len(), 1);
        assert!(matches!(scene.queries[0].1, Query::CharV { .. }));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = format!("# leading comment\n\n{MINIMAL}\n# trailing");
        assert!(parse_scene(&text).is_ok());
    }

    #[test]
    fn negative_radius_is_rejected() {
        let text = "[surface]\nkind = sphere\nradius = -1\n";
        let e = parse_scene(text).unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("radius"));
    }

    #[test]
    fn zero_grid_is_rejected() {
        let text = format!("{MINIMAL}\n[options]\ngrid = 0\n");
        let e = parse_scene(&text).unwrap_err();
        assert!(e.message.contains("grid"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "[surface]\nkind = plane\nnormal = 0,0,1\ncolor = red\n";
        let e = parse_scene(text).unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.message.contains("color"));
    }

    #[test]
    fn unknown_query_keys_are_rejected() {
        let text = format!("{MINIMAL}[query.2]\nkind = char_T\nxi1 = 0,0\nxi2 = 1,0\nbogus = 1\n");
        let e = parse_scene(&text).unwrap_err();
        assert!(e.message.contains("bogus"));
    }

    #[test]
    fn duplicate_query_ids_are_rejected() {
        let text = format!("{MINIMAL}[query.1]\nkind = domain_V\np1 = 0,0,1\np2 = 2,0,1\n");
        let e = parse_scene(&text).unwrap_err();
        assert!(e.message.contains("duplicate query id"));
    }

    #[test]
    fn queries_come_back_sorted_by_id() {
        let text = "\
[surface]
kind = sphere
radius = 1

[query.10]
kind = domain_V
p1 = 2,0,0
p2 = 2,0,0

[query.2]
kind = char_T
dir1 = 0,0,1
dir2 = 1,0,0
";
        let scene = parse_scene(text).unwrap();
        let ids: Vec<u64> = scene.queries.iter().map(|(id, _)| *id).collect();
        assert_eq!(ids, vec![2, 10]);
    }

    #[test]
    fn directions_are_normalized() {
        let text = "\
[surface]
kind = plane
normal = 0,0,2

[query.1]
kind = convert
dir = 3,0,4
";
        let scene = parse_scene(text).unwrap();
        let (_, Query::Convert { input: ChartInput::Dir(d), .. }) = scene.queries[0] else {
            panic!("expected a direction convert query");
        };
        assert!((d.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mutually_exclusive_direction_forms_are_rejected() {
        let text = format!("{MINIMAL}[query.2]\nkind = char_T\nxi1 = 0,0\ndir1 = 0,0,1\nxi2 = 1,0\n");
        let e = parse_scene(&text).unwrap_err();
        assert!(e.message.contains("mutually exclusive"));
    }

    #[test]
    fn missing_surface_is_rejected() {
        let e = parse_scene("[query.1]\nkind = convert\ndir = 0,0,1\n").unwrap_err();
        assert!(e.message.contains("missing [surface]"));
    }
}
