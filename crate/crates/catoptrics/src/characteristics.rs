//! Hamilton's three characteristic functions for a single mirror
//! reflection, evaluated on the oriented-line chart.
//!
//! Each function answers a different question about the family of rays a
//! mirror `S` reflects:
//!
//! * the **angle characteristic** `T` takes a pair of chart directions
//!   (ξ₁, ξ₂) and asks at which surface frames an incoming line with
//!   direction ξ₁ reflects into direction ξ₂;
//! * the **mixed characteristic** `W` takes a source point `p₁` and an
//!   outgoing direction ξ₂ and asks which feet on `S` turn some line
//!   through `p₁` into a line with direction ξ₂;
//! * the **point characteristic** `V` takes a source `p₁` and a target
//!   `p₂` and asks for the specular points joining them.
//!
//! Domain membership reduces to polynomial equations in the chart data of
//! the surface frame; the solvers here run a damped multistart Newton over
//! the parameter rectangle and certify every root by re-evaluating its
//! defining equations.  Values are reported as nonnegative path lengths
//! together with the signed line parameters (`s₁`, `s₂`, `r₁`, `r₂`) they
//! are assembled from, so callers can impose any sign convention.
//!
//! All solvers treat the mirror as a two-sided set of specular points:
//! a root counts even when the physical ray would travel "backwards" or be
//! blocked by another sheet of the surface.  Orientation conventions are
//! canonical: the incoming direction of a reported root travels from the
//! source toward the foot.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::line_space::{antipode, chordal, eta_r_of_point, Point3, CHART_CAP};
use crate::reflection::{inverse_reflect_direction, mirror_normal, reflect_direction, MirrorNormal};
use crate::scalar::{real, to_f64, Real};
pub use crate::solver::newton_solve;
use crate::solver::{multistart, ResidualEval, SearchResult, SolveOptions};
use crate::surfaces::{MirrorSurface, SurfaceFrame};

/// Angle query: incoming and outgoing chart directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharQueryT<T> {
    pub xi1: Complex<T>,
    pub xi2: Complex<T>,
}

/// Mixed query: a source point and an outgoing chart direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharQueryW<T> {
    pub p1: Point3<T>,
    pub xi2: Complex<T>,
}

/// Point query: a source and a target point (equal points are allowed and
/// describe retroreflection).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharQueryV<T> {
    pub p1: Point3<T>,
    pub p2: Point3<T>,
}

/// One solved characteristic evaluation.
///
/// `value` is the nonnegative characteristic length; the remaining fields
/// expose the solved frame and the signed line parameters so any sign
/// convention can be reconstructed.  `s1`/`s2` are absent where the query
/// has no source/target point.  `residual` is the scaled max residual of
/// the defining equations re-evaluated at the returned solution.
#[derive(Clone, Copy, Debug)]
pub struct CharacteristicResult<T> {
    pub value: T,
    pub mu: Complex<T>,
    pub xi0: Complex<T>,
    pub xi1: Complex<T>,
    pub xi2: Complex<T>,
    pub s1: Option<T>,
    pub s2: Option<T>,
    pub r1: T,
    pub r2: T,
    pub residual: T,
}

/// A solved specular incidence: the surface frame at the reflection foot
/// together with the incoming chart direction that satisfies the domain
/// equations there.
#[derive(Clone, Copy, Debug)]
pub struct IncidenceRoot<T: Real> {
    pub frame: SurfaceFrame<T>,
    pub xi1: Complex<T>,
    pub residual: T,
}

fn chart_valid<T: Real>(xi: Complex<T>) -> Result<()> {
    if !xi.re.is_finite() || !xi.im.is_finite() {
        return Err(Error::DegenerateInput("chart direction is not finite"));
    }
    if xi.norm() > real(CHART_CAP) {
        return Err(Error::ChartExcluded);
    }
    Ok(())
}

fn finite_point<T: Real>(p: Point3<T>) -> Result<()> {
    if p.z.re.is_finite() && p.z.im.is_finite() && p.t.is_finite() {
        Ok(())
    } else {
        Err(Error::DegenerateInput("point has non-finite coordinates"))
    }
}

/// Signed parameter of `p` along the oriented line through `p` with chart
/// direction ξ; the line's perpendicular foot sits at parameter zero.
fn line_param<T: Real>(xi: Complex<T>, p: Point3<T>) -> T {
    eta_r_of_point(xi, p).1
}

/// Scaled residual of the mixed-characteristic domain equation at a
/// frame.
///
/// The equation states that the line through `p1` whose direction is the
/// reflection of ξ₂ at the frame also passes through the frame's foot.
/// Cleared of denominators it is polynomial in the frame data; the scale
/// entries hold the largest monomial magnitude at the evaluation point so
/// the scaled norm stays meaningful across the chart.
pub fn w_equation<T: Real>(
    frame: &SurfaceFrame<T>,
    p1: Point3<T>,
    xi2: Complex<T>,
) -> ResidualEval<T, 2> {
    let two = real::<T>(2.0);
    let u0 = frame.xi0.norm_sqr();
    let one_u = T::one() + u0;
    let one_c = Complex::new(T::one(), T::zero());
    // Denominator and numerator of the reflected direction ξ₁ = N/D.
    let big_d = xi2.conj() * (T::one() - u0) - frame.xi0.conj() * two;
    let big_n = frame.xi0 * xi2.conj() * two + Complex::new(T::one() - u0, T::zero());
    let a = (frame.xi0 - xi2).conj();
    let b = frame.xi0 * xi2.conj() + one_c;
    let m1 = p1.z * big_d * big_d;
    let m2 = -(big_d * big_n) * (two * p1.t);
    let m3 = -(p1.z.conj() * big_n * big_n);
    let m4 = -(a * a * frame.eta0) * two;
    let m5 = (b * b * frame.eta0.conj()) * two;
    let m6 = -(a * b) * (two * one_u * frame.r0);
    let sum = m1 + m2 + m3 + m4 + m5 + m6;
    let scale = T::one()
        .max(m1.norm())
        .max(m2.norm())
        .max(m3.norm())
        .max(m4.norm())
        .max(m5.norm())
        .max(m6.norm());
    ResidualEval {
        raw: [sum.re, sum.im],
        scale: [scale, scale],
    }
}

/// Scaled residuals of the two point-characteristic domain equations at a
/// frame, for a trial incoming direction ξ₁.
///
/// The second equation states that the line through `p1` with direction
/// ξ₁ passes through the frame's foot; the first states that the
/// reflected line ξ₂ (with ξ₂ = N₁/D₁ eliminated) passes through `p2`.
/// Both are cleared of denominators; scales are per-equation largest
/// monomial magnitudes.
pub fn v_equations<T: Real>(
    frame: &SurfaceFrame<T>,
    p1: Point3<T>,
    p2: Point3<T>,
    xi1: Complex<T>,
) -> ResidualEval<T, 4> {
    let two = real::<T>(2.0);
    let four = real::<T>(4.0);
    let u0 = frame.xi0.norm_sqr();
    let one_u = T::one() + u0;
    let w2 = one_u * one_u;
    let one_c = Complex::new(T::one(), T::zero());
    // ξ₂ = N₁/D₁ at this frame.
    let d1 = xi1.conj() * (T::one() - u0) - frame.xi0.conj() * two;
    let n1 = frame.xi0 * xi1.conj() * two + Complex::new(T::one() - u0, T::zero());
    let a1 = (frame.xi0 - xi1).conj();
    let b1 = frame.xi0 * xi1.conj() + one_c;
    // Target-side equation: the reflected line meets p₂.
    let q1 = p2.z * d1 * d1;
    let q2 = -(d1 * n1) * (two * p2.t);
    let q3 = -(p2.z.conj() * n1 * n1);
    let q4 = p1.z.conj() * w2;
    let q5 = -(xi1.conj() * (two * w2 * p1.t));
    let q6 = -(p1.z * xi1.conj() * xi1.conj()) * w2;
    let q7 = -(a1 * b1) * (four * one_u * frame.r0);
    let sum1 = q1 + q2 + q3 + q4 + q5 + q6 + q7;
    let scale1 = T::one()
        .max(q1.norm())
        .max(q2.norm())
        .max(q3.norm())
        .max(q4.norm())
        .max(q5.norm())
        .max(q6.norm())
        .max(q7.norm());
    // Source-side equation: the incoming line meets the foot.
    let g1 = p1.z * w2;
    let g2 = -(xi1 * (two * w2 * p1.t));
    let g3 = -(p1.z.conj() * xi1 * xi1) * w2;
    let g4 = -(b1.conj() * b1.conj() * frame.eta0) * two;
    let g5 = (a1.conj() * a1.conj() * frame.eta0.conj()) * two;
    let g6 = -(a1.conj() * b1.conj()) * (two * one_u * frame.r0);
    let sum2 = g1 + g2 + g3 + g4 + g5 + g6;
    let scale2 = T::one()
        .max(g1.norm())
        .max(g2.norm())
        .max(g3.norm())
        .max(g4.norm())
        .max(g5.norm())
        .max(g6.norm());
    ResidualEval {
        raw: [sum1.re, sum1.im, sum2.re, sum2.im],
        scale: [scale1, scale1, scale2, scale2],
    }
}

fn grid_seeds<T: Real>(surface: &MirrorSurface<T>, n: usize) -> Vec<[T; 2]> {
    surface.domain.grid(n).iter().map(|m| [m.re, m.im]).collect()
}

fn solver_failure<T: Real>(best_residual: T) -> Error {
    Error::SolverFailure {
        best_residual: to_f64(best_residual),
    }
}

/// Frames at which an incoming line with direction ξ₁ reflects into
/// direction ξ₂: all surface parameters whose Gauss-map value matches the
/// mirror-normal direction of the pair, in either orientation.
///
/// Frames differing only by a translation along a flat piece of the
/// mirror carry identical (ξ₀, r₀) data and hence identical angle values;
/// such families are collapsed to their lexicographically smallest
/// representative.  An empty list means the pair is out of the domain, up
/// to completeness of the multistart grid.
pub fn domain_t<T: Real>(
    surface: &MirrorSurface<T>,
    q: CharQueryT<T>,
    opts: &SolveOptions<T>,
) -> Result<Vec<SurfaceFrame<T>>> {
    chart_valid(q.xi1)?;
    chart_valid(q.xi2)?;
    let targets = match mirror_normal(q.xi1, q.xi2)? {
        MirrorNormal::InChart(xi0) => {
            let mut t = vec![xi0];
            if let Ok(anti) = antipode(xi0) {
                if anti.norm() <= real(CHART_CAP) {
                    t.push(anti);
                }
            }
            t
        }
        // The mirror normal is the horizontal-equator limit of the chart;
        // only its antipodal representative ξ = 0 is reachable.
        MirrorNormal::AtInfinity => vec![Complex::new(T::zero(), T::zero())],
    };
    let rect = surface.domain;
    let margin = real::<T>(1e-9);
    let seeds = grid_seeds(surface, opts.grid);
    let accept = |x: &[T; 2]| rect.contains_margin(Complex::new(x[0], x[1]), margin);
    let mut frames: Vec<SurfaceFrame<T>> = Vec::new();
    for &target in &targets {
        let f = |x: &[T; 2]| {
            let mu = Complex::new(x[0], x[1]);
            let frame = surface.frame_at_unclamped(mu).ok()?;
            let diff = frame.xi0 - target;
            let scale = T::one().max(frame.xi0.norm()).max(target.norm());
            Some(ResidualEval {
                raw: [diff.re, diff.im],
                scale: [scale, scale],
            })
        };
        match multistart(&f, &seeds, &accept, opts) {
            SearchResult::Roots(roots) => {
                for r in roots {
                    let mu = rect.clamp(Complex::new(r.x[0], r.x[1]));
                    if let Ok(frame) = surface.frame_at(mu) {
                        frames.push(frame);
                    }
                }
            }
            SearchResult::VerifiedEmpty { .. } => {}
            SearchResult::Failed { best_residual } => {
                return Err(solver_failure(best_residual));
            }
        }
    }
    frames.sort_by(|a, b| {
        (to_f64(a.mu.re), to_f64(a.mu.im))
            .partial_cmp(&(to_f64(b.mu.re), to_f64(b.mu.im)))
            .unwrap()
    });
    // Collapse flat families: quantize (ξ₀, r₀) and keep the first (μ-lex
    // smallest) frame of each class.
    let quantum = 1e-7;
    let mut seen = std::collections::HashSet::new();
    frames.retain(|f| {
        let key = (
            (to_f64(f.xi0.re) / quantum).round() as i64,
            (to_f64(f.xi0.im) / quantum).round() as i64,
            (to_f64(f.r0) / quantum).round() as i64,
        );
        seen.insert(key)
    });
    Ok(frames)
}

/// Angle characteristic: one result per frame in the domain, with value
/// equal to the chordal distance of the two directions times the frame's
/// perpendicular support `r₀` (reported as an absolute length).
pub fn char_t<T: Real>(
    surface: &MirrorSurface<T>,
    q: CharQueryT<T>,
    opts: &SolveOptions<T>,
) -> Result<Vec<CharacteristicResult<T>>> {
    let frames = domain_t(surface, q, opts)?;
    let targets = match mirror_normal(q.xi1, q.xi2)? {
        MirrorNormal::InChart(xi0) => match antipode(xi0) {
            Ok(anti) => vec![xi0, anti],
            Err(_) => vec![xi0],
        },
        MirrorNormal::AtInfinity => vec![Complex::new(T::zero(), T::zero())],
    };
    let out = frames
        .into_iter()
        .map(|frame| {
            let value = (chordal(q.xi1, q.xi2) * frame.r0).abs();
            let (_, r1) = eta_r_of_point(q.xi1, frame.foot);
            let (_, r2) = eta_r_of_point(q.xi2, frame.foot);
            // Certification for the angle domain is the Gauss-image
            // match itself.
            let residual = targets
                .iter()
                .map(|t| (frame.xi0 - *t).norm() / T::one().max(t.norm()))
                .fold(T::infinity(), T::min);
            CharacteristicResult {
                value,
                mu: frame.mu,
                xi0: frame.xi0,
                xi1: q.xi1,
                xi2: q.xi2,
                s1: None,
                s2: None,
                r1,
                r2,
                residual,
            }
        })
        .collect();
    Ok(out)
}

/// Feet at which some line through `p1` reflects into direction ξ₂,
/// found by a multistart Newton solve of the mixed domain equation over
/// the parameter rectangle.
///
/// Roots whose incoming direction falls in the excluded chart cap are
/// dropped.  An empty list is a certified miss: the scaled residual stays
/// above the miss margin everywhere on the searched grid.
pub fn domain_w<T: Real>(
    surface: &MirrorSurface<T>,
    q: CharQueryW<T>,
    opts: &SolveOptions<T>,
) -> Result<Vec<IncidenceRoot<T>>> {
    finite_point(q.p1)?;
    chart_valid(q.xi2)?;
    let rect = surface.domain;
    let margin = real::<T>(1e-9);
    let seeds = grid_seeds(surface, opts.grid);
    let accept = |x: &[T; 2]| rect.contains_margin(Complex::new(x[0], x[1]), margin);
    let f = |x: &[T; 2]| {
        let mu = Complex::new(x[0], x[1]);
        let frame = surface.frame_at_unclamped(mu).ok()?;
        Some(w_equation(&frame, q.p1, q.xi2))
    };
    match multistart(&f, &seeds, &accept, opts) {
        SearchResult::Roots(roots) => {
            let mut out = Vec::new();
            for r in roots {
                let mu = rect.clamp(Complex::new(r.x[0], r.x[1]));
                let Ok(frame) = surface.frame_at(mu) else {
                    continue;
                };
                // Recover the incoming direction by reflecting the
                // outgoing one back through the frame (the law is an
                // involution); drop pole-direction incidences.
                let Ok(xi1) = inverse_reflect_direction(frame.xi0, q.xi2) else {
                    continue;
                };
                let residual = w_equation(&frame, q.p1, q.xi2).norm();
                out.push(IncidenceRoot {
                    frame,
                    xi1,
                    residual,
                });
            }
            sort_roots(&mut out);
            Ok(out)
        }
        SearchResult::VerifiedEmpty { .. } => Ok(Vec::new()),
        SearchResult::Failed { best_residual } => Err(solver_failure(best_residual)),
    }
}

/// Mixed characteristic: for each domain root, the distance from `p1` to
/// the foot plus the signed run from the foot back to the outgoing line's
/// perpendicular foot, reported as an absolute length.
pub fn char_w<T: Real>(
    surface: &MirrorSurface<T>,
    q: CharQueryW<T>,
    opts: &SolveOptions<T>,
) -> Result<Vec<CharacteristicResult<T>>> {
    let out = domain_w(surface, q, opts)?
        .into_iter()
        .map(|root| {
            let frame = root.frame;
            let s1 = line_param(root.xi1, q.p1);
            let (_, r1) = eta_r_of_point(root.xi1, frame.foot);
            let (_, r2) = eta_r_of_point(q.xi2, frame.foot);
            let value = (s1 - (r1 - r2)).abs();
            CharacteristicResult {
                value,
                mu: frame.mu,
                xi0: frame.xi0,
                xi1: root.xi1,
                xi2: q.xi2,
                s1: Some(s1),
                s2: None,
                r1,
                r2,
                residual: root.residual,
            }
        })
        .collect();
    Ok(out)
}

/// Specular points joining `p1` to `p2`: a multistart Newton solve in the
/// four real unknowns (μ, ξ₁) of the coupled point domain equations.
///
/// Each grid seed aims the incoming direction from `p1` at the local
/// foot.  Of the two line orientations solving the same geometric path,
/// the canonical one (incoming direction traveling from `p1` toward the
/// foot) is kept.  Roots whose outgoing direction falls in the excluded
/// chart cap are dropped.
pub fn domain_v<T: Real>(
    surface: &MirrorSurface<T>,
    q: CharQueryV<T>,
    opts: &SolveOptions<T>,
) -> Result<Vec<IncidenceRoot<T>>> {
    finite_point(q.p1)?;
    finite_point(q.p2)?;
    let rect = surface.domain;
    let margin = real::<T>(1e-9);
    let cap = real::<T>(CHART_CAP);
    let p1v = q.p1.to_vec3();
    let mut seeds: Vec<[T; 4]> = Vec::new();
    for m in rect.grid(opts.grid) {
        let Ok((foot, _)) = surface.point_normal_at(m) else {
            continue;
        };
        let v = foot - p1v;
        let len = v.norm();
        if len < real(1e-9) {
            continue;
        }
        let Ok(xi1) = crate::line_space::dir_to_xi(v / len) else {
            continue;
        };
        seeds.push([m.re, m.im, xi1.re, xi1.im]);
    }
    let accept = |x: &[T; 4]| {
        rect.contains_margin(Complex::new(x[0], x[1]), margin)
            && Complex::new(x[2], x[3]).norm() <= cap
    };
    let f = |x: &[T; 4]| {
        let mu = Complex::new(x[0], x[1]);
        let xi1 = Complex::new(x[2], x[3]);
        if xi1.norm() > cap {
            return None;
        }
        let frame = surface.frame_at_unclamped(mu).ok()?;
        Some(v_equations(&frame, q.p1, q.p2, xi1))
    };
    match multistart(&f, &seeds, &accept, opts) {
        SearchResult::Roots(roots) => {
            let orient_tol = real::<T>(1e-9) * (T::one() + q.p1.norm());
            let mut out = Vec::new();
            for r in roots {
                let mu = rect.clamp(Complex::new(r.x[0], r.x[1]));
                let xi1 = Complex::new(r.x[2], r.x[3]);
                let Ok(frame) = surface.frame_at(mu) else {
                    continue;
                };
                if reflect_direction(frame.xi0, xi1).is_err() {
                    continue;
                }
                // Canonical orientation: the foot parameter must not
                // precede the source parameter on the incoming line.
                let s1 = line_param(xi1, q.p1);
                let (_, r1) = eta_r_of_point(xi1, frame.foot);
                if r1 < s1 - orient_tol {
                    continue;
                }
                let residual = v_equations(&frame, q.p1, q.p2, xi1).norm();
                out.push(IncidenceRoot {
                    frame,
                    xi1,
                    residual,
                });
            }
            sort_roots(&mut out);
            Ok(out)
        }
        SearchResult::VerifiedEmpty { .. } => Ok(Vec::new()),
        SearchResult::Failed { best_residual } => Err(solver_failure(best_residual)),
    }
}

/// Point characteristic: for each domain root, the total signed path run
/// from `p1` to the foot and on to `p2`, reported as an absolute length.
pub fn char_v<T: Real>(
    surface: &MirrorSurface<T>,
    q: CharQueryV<T>,
    opts: &SolveOptions<T>,
) -> Result<Vec<CharacteristicResult<T>>> {
    let mut out = Vec::new();
    for root in domain_v(surface, q, opts)? {
        let frame = root.frame;
        let xi2 = reflect_direction(frame.xi0, root.xi1)?;
        let s1 = line_param(root.xi1, q.p1);
        let s2 = line_param(xi2, q.p2);
        let (_, r1) = eta_r_of_point(root.xi1, frame.foot);
        let (_, r2) = eta_r_of_point(xi2, frame.foot);
        let value = (s1 - s2 - (r1 - r2)).abs();
        out.push(CharacteristicResult {
            value,
            mu: frame.mu,
            xi0: frame.xi0,
            xi1: root.xi1,
            xi2,
            s1: Some(s1),
            s2: Some(s2),
            r1,
            r2,
            residual: root.residual,
        });
    }
    Ok(out)
}

fn sort_roots<T: Real>(roots: &mut [IncidenceRoot<T>]) {
    roots.sort_by(|a, b| {
        let ka = (
            to_f64(a.frame.mu.re),
            to_f64(a.frame.mu.im),
            to_f64(a.xi1.re),
            to_f64(a.xi1.im),
        );
        let kb = (
            to_f64(b.frame.mu.re),
            to_f64(b.frame.mu.im),
            to_f64(b.xi1.re),
            to_f64(b.xi1.im),
        );
        ka.partial_cmp(&kb).unwrap()
    });
}
