//! Solves the point characteristic between the two foci of an ellipsoid
//! mirror and prints every bounce. Each value equals the major axis.

use catoptrics::{
    char_v, CharQueryV, MirrorSurfaceD, Orientation, ParamRectD, Point3D,
    SolveOptionsD, Vec3D,
};

fn main() -> catoptrics::Result<()> {
    let mirror = MirrorSurfaceD::ellipsoid(
        Vec3D::zero(),
        [2.0, 3f64.sqrt(), 3f64.sqrt()],
        Orientation::Inward,
        ParamRectD::square(4.0)?,
    )?;
    let roots = char_v(
        &mirror,
        CharQueryV {
            // The two foci of the ellipsoid.
            p1: Point3D::from_vec3(Vec3D::new(-1.0, 0.0, 0.0)),
            p2: Point3D::from_vec3(Vec3D::new(1.0, 0.0, 0.0)),
        },
        &SolveOptionsD::default(),
    )?;
    for r in &roots {
        // Every focus-to-focus bounce measures the major axis: value = 4.
        println!("mu = {}, value = {}", r.mu, r.value);
    }
    Ok(())
}
