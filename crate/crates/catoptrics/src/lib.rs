//! Mirror reflection geometry in the space of oriented lines.
//!
//! An oriented line in ℝ³ is recorded by two complex numbers: the
//! stereographic chart value ξ of its direction and a moment η encoding
//! where the line sits; a third real parameter locates points along the
//! line.  In these coordinates reflection off a smooth mirror surface
//! becomes an explicit Möbius-type transformation of (ξ, η), and
//! Hamilton's three characteristic functions — the angle (`T`), mixed
//! (`W`), and point (`V`) characteristics — reduce to polynomial
//! equations in the chart data of the reflecting frame.
//!
//! The crate is organized in layers:
//!
//! * [`line_space`] — the chart on oriented lines: direction maps,
//!   incidence, and the moment/parameter decomposition of a point.
//! * [`surfaces`] — mirror shapes (plane, sphere, paraboloid, ellipsoid,
//!   and user-supplied parametric patches) with their Gauss-map frames,
//!   normal-congruence transport, and an integrability test for line
//!   congruences.
//! * [`reflection`] — the reflection law for directions and full lines,
//!   and the mirror-normal construction from an (incoming, outgoing)
//!   pair.
//! * [`characteristics`] — domain solvers and values for Hamilton's
//!   three characteristic functions, built on a damped multistart Newton
//!   solver ([`solver`]).
//! * [`oracle`] — an independent vector-geometry route (rays, surface
//!   intersection, specular search) used to cross-check every chart-side
//!   computation.
//!
//! Everything is generic over the floating scalar through the
//! [`scalar::Real`] trait; the `…D`/`…F` aliases below fix `f64`/`f32`.
//!
//! Conventions: the direction chart is taken from the north pole, so the
//! straight-down direction (0, 0, −1) is excluded (`ChartExcluded`);
//! lines are oriented, and solvers report each geometric path with the
//! incoming direction traveling from the source toward the mirror;
//! reported characteristic values are absolute lengths alongside the
//! signed line parameters they are assembled from.

pub mod characteristics;
pub mod error;
pub mod line_space;
pub mod oracle;
pub mod reflection;
pub mod scalar;
pub mod solver;
pub mod surfaces;
pub mod vec3;

pub use characteristics::{
    char_t, char_v, char_w, domain_t, domain_v, domain_w, newton_solve, v_equations, w_equation,
    CharQueryT, CharQueryV, CharQueryW, CharacteristicResult, IncidenceRoot,
};
pub use error::{Error, Result};
pub use line_space::{
    antipode, chordal, dir_to_xi, eta_r_of_point, line_from_point_xi, line_through_points, phi,
    xi_to_dir, LinePointParam, OrientedLine, Point3, CHART_CAP, DIR_NORM_TOL,
};
pub use oracle::{
    foot_params, intersect, oracle_t, oracle_v, oracle_w, reflect_vec, FootParams, Hit, Ray3,
    ReflectedPath, Station, TwoPointPath,
};
pub use reflection::{
    inverse_reflect_direction, mirror_normal, reflect_direction, reflect_line, MirrorNormal,
    ReflectionEvent,
};
pub use scalar::Real;
pub use solver::{multistart, SearchResult, SolveOptions};
pub use surfaces::{
    integrability_residual, line_hits_surface, us_eta, MirrorSurface, Orientation, ParamRect,
    SurfaceFrame, SurfaceKind,
};
pub use vec3::Vec3;

/// Double-precision aliases for the main types.
pub type ComplexD = num_complex::Complex<f64>;
pub type Vec3D = Vec3<f64>;
pub type Point3D = Point3<f64>;
pub type OrientedLineD = OrientedLine<f64>;
pub type ParamRectD = ParamRect<f64>;
pub type MirrorSurfaceD = MirrorSurface<f64>;
pub type SurfaceFrameD = SurfaceFrame<f64>;
pub type SolveOptionsD = SolveOptions<f64>;
pub type CharacteristicResultD = CharacteristicResult<f64>;

/// Single-precision aliases for the main types.
pub type ComplexF = num_complex::Complex<f32>;
pub type Vec3F = Vec3<f32>;
pub type Point3F = Point3<f32>;
pub type OrientedLineF = OrientedLine<f32>;
pub type ParamRectF = ParamRect<f32>;
pub type MirrorSurfaceF = MirrorSurface<f32>;
pub type SurfaceFrameF = SurfaceFrame<f32>;
pub type SolveOptionsF = SolveOptions<f32>;
pub type CharacteristicResultF = CharacteristicResult<f32>;
