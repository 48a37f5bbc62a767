//! Built-in sanity checks runnable without any input file.
//!
//! Each check prints one `[selftest] name: PASS|FAIL` line; the command
//! exits nonzero if any check fails. The fixtures are closed-form
//! configurations whose expected values are elementary: chart landmarks,
//! plane-mirror conjugate inverses, the sphere chord length, the
//! mirror-image construction, and the determinism of the CSV pipeline.

use catoptrics::{
    char_t, char_v, char_w, chordal, dir_to_xi, domain_t, reflect_direction, xi_to_dir, CharQueryT,
    CharQueryV, CharQueryW, ComplexD, MirrorSurface, Orientation, ParamRect, Point3, SolveOptionsD,
    Vec3D,
};

use crate::run::{run_scene, Overrides};
use crate::scene::parse_scene;

const TOL_EXACT: f64 = 1e-12;
const TOL_VALUE: f64 = 1e-9;

fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn cnear(a: ComplexD, b: ComplexD, tol: f64) -> bool {
    (a - b).norm() <= tol
}

fn plane_z0() -> catoptrics::MirrorSurfaceD {
    MirrorSurface::plane(
        Vec3D::zero(),
        Vec3D::new(0.0, 0.0, 1.0),
        ParamRect::square(8.0).unwrap(),
    )
    .unwrap()
}

fn unit_sphere() -> catoptrics::MirrorSurfaceD {
    MirrorSurface::sphere(
        Vec3D::zero(),
        1.0,
        Orientation::Outward,
        ParamRect::square(4.0).unwrap(),
    )
    .unwrap()
}

fn chart_landmarks() -> bool {
    let sqrt2 = 2.0f64.sqrt();
    let cases = [
        (Vec3D::new(0.0, 0.0, 1.0), ComplexD::new(0.0, 0.0)),
        (Vec3D::new(1.0, 0.0, 0.0), ComplexD::new(1.0, 0.0)),
        (
            Vec3D::new(1.0 / sqrt2, 0.0, -1.0 / sqrt2),
            ComplexD::new(sqrt2 + 1.0, 0.0),
        ),
    ];
    cases.iter().all(|&(d, xi)| {
        dir_to_xi(d).is_ok_and(|got| cnear(got, xi, TOL_EXACT))
            && (xi_to_dir(xi) - d).norm() <= TOL_EXACT
    })
}

fn plane_conjugate_inverse() -> bool {
    let samples = [
        ComplexD::new(2.0f64.sqrt() + 1.0, 0.0),
        ComplexD::new(0.4, -1.3),
        ComplexD::new(-2.0, 0.7),
    ];
    let zero = ComplexD::new(0.0, 0.0);
    samples.iter().all(|&xi1| {
        reflect_direction(zero, xi1)
            .is_ok_and(|xi2| cnear(xi2, xi1.conj().inv(), TOL_EXACT))
    })
}

fn sphere_chord_length() -> bool {
    // 45-degree incidence at the foot (1,0,0): the chord cut from the
    // unit sphere has length 2R cos(45 deg) = sqrt(2).
    let root2p1 = 2.0f64.sqrt() + 1.0;
    let query = CharQueryT {
        xi1: ComplexD::new(-root2p1, 0.0),
        xi2: ComplexD::new(root2p1, 0.0),
    };
    let Ok(results) = char_t(&unit_sphere(), query, &SolveOptionsD::default()) else {
        return false;
    };
    !results.is_empty()
        && results
            .iter()
            .all(|r| near(r.value, 2.0f64.sqrt(), TOL_VALUE))
}

fn plane_mixed_value() -> bool {
    // Source (0,0,1), outgoing 45-degree direction: the path length from
    // the source to the outgoing line's closest-to-origin point is
    // sqrt(2) - 1/sqrt(2) = 1/sqrt(2).
    let query = CharQueryW {
        p1: Point3::from_vec3(Vec3D::new(0.0, 0.0, 1.0)),
        xi2: ComplexD::new(2.0f64.sqrt() - 1.0, 0.0),
    };
    let Ok(results) = char_w(&plane_z0(), query, &SolveOptionsD::default()) else {
        return false;
    };
    results.len() == 1 && near(results[0].value, 1.0 / 2.0f64.sqrt(), 1e-10)
}

fn plane_point_value() -> bool {
    // Mirror image of (0,0,1) is (0,0,-1); distance to (2,0,1) is 2*sqrt(2).
    let query = CharQueryV {
        p1: Point3::from_vec3(Vec3D::new(0.0, 0.0, 1.0)),
        p2: Point3::from_vec3(Vec3D::new(2.0, 0.0, 1.0)),
    };
    let Ok(results) = char_v(&plane_z0(), query, &SolveOptionsD::default()) else {
        return false;
    };
    results.len() == 1 && near(results[0].value, 2.0 * 2.0f64.sqrt(), 1e-10)
}

fn retroreflection_values() -> bool {
    // Out-and-back from (2,0,0): the near root travels 1 out and 1 back.
    let query = CharQueryV {
        p1: Point3::from_vec3(Vec3D::new(2.0, 0.0, 0.0)),
        p2: Point3::from_vec3(Vec3D::new(2.0, 0.0, 0.0)),
    };
    let Ok(results) = char_v(&unit_sphere(), query, &SolveOptionsD::default()) else {
        return false;
    };
    results.iter().any(|r| near(r.value, 2.0, TOL_VALUE))
}

fn empty_angle_domain() -> bool {
    // A plane's Gauss image is a single direction: asking it to turn
    // (1,0,0) into (0,1,0) must yield a verified empty domain.
    let query = CharQueryT {
        xi1: ComplexD::new(1.0, 0.0),
        xi2: ComplexD::new(0.0, 1.0),
    };
    matches!(
        domain_t(&plane_z0(), query, &SolveOptionsD::default()).as_deref(),
        Ok([])
    )
}

fn reflection_consistency() -> bool {
    // Spot-check the direction law against the vector route on a
    // non-axis-aligned normal.
    let n = Vec3D::new(1.0, -1.0, 0.0).normalized();
    let d = Vec3D::new(1.0, 0.0, 0.0);
    let refl = d - n * (2.0 * d.dot(n));
    let (Ok(xi0), Ok(xi1), Ok(want)) = (dir_to_xi(n), dir_to_xi(d), dir_to_xi(refl)) else {
        return false;
    };
    reflect_direction(xi0, xi1).is_ok_and(|got| chordal(got, want) <= 1e-10)
}

const EMBEDDED_SCENE: &str = "\
[surface]
kind = plane
normal = 0,0,1

[query.1]
kind = char_V
p1 = 0,0,1
p2 = 2,0,1

[query.2]
kind = char_W
p1 = 0,0,1
xi2 = 0.414213562373,0
";

fn csv_pipeline_values() -> bool {
    let Ok(scene) = parse_scene(EMBEDDED_SCENE) else {
        return false;
    };
    let mut buf = Vec::new();
    let report = run_scene(&scene, &Overrides::default(), &mut buf);
    let Ok(csv) = String::from_utf8(buf) else {
        return false;
    };
    let lines: Vec<&str> = csv.lines().collect();
    report.solver_failures == 0
        && lines.len() == 3
        && lines[1].starts_with("1,char_V,ok,2.8284271247")
        && lines[2].starts_with("2,char_W,ok,0.70710678")
}

fn csv_pipeline_determinism() -> bool {
    let Ok(scene) = parse_scene(EMBEDDED_SCENE) else {
        return false;
    };
    let render = || {
        let mut buf = Vec::new();
        run_scene(&scene, &Overrides::default(), &mut buf);
        buf
    };
    render() == render()
}

fn parse_rejections() -> bool {
    let negative_radius = "[surface]\nkind = sphere\nradius = -1\n";
    let zero_grid = "\
[surface]
kind = plane
normal = 0,0,1

[options]
grid = 0
";
    let unknown_key = "\
[surface]
kind = plane
normal = 0,0,1
color = red
";
    parse_scene(negative_radius).is_err()
        && parse_scene(zero_grid).is_err()
        && parse_scene(unknown_key).is_err()
}

type Check = (&'static str, fn() -> bool);

pub fn run_all() -> bool {
    let checks: [Check; 11] = [
        ("chart landmarks", chart_landmarks),
        ("plane conjugate inverse", plane_conjugate_inverse),
        ("reflection vs vector route", reflection_consistency),
        ("sphere chord length", sphere_chord_length),
        ("plane mixed value", plane_mixed_value),
        ("plane point value", plane_point_value),
        ("sphere retroreflection", retroreflection_values),
        ("empty angle domain", empty_angle_domain),
        ("csv pipeline values", csv_pipeline_values),
        ("csv pipeline determinism", csv_pipeline_determinism),
        ("scene parse rejections", parse_rejections),
    ];
    let mut all = true;
    for (name, check) in checks {
        let ok = check();
        println!("[selftest] {name}: {}", if ok { "PASS" } else { "FAIL" });
        all &= ok;
    }
    all
}
