//! Oriented mirror surfaces and their normal congruences.
//!
//! Every surface is a parameterized patch over a rectangle in the complex
//! μ-plane. The catalog fixes the parameterization so that Gauss-image
//! membership is a plain domain check: for the sphere and ellipsoid μ is
//! the chart value of the oriented normal itself, while the plane and
//! paraboloid are graphs over the tangent plane at a base point, with μ
//! the in-plane offset. A user-supplied parametric kind accepts arbitrary
//! chart closures.
//!
//! `frame_at` samples the normal congruence: the oriented normal line
//! (ξ₀, η₀) through the surface point, plus the affine parameter r₀ of
//! that point along its own normal. This is the data every downstream
//! reflection and characteristic-function formula consumes.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::One;

use crate::error::{Error, Result};
use crate::line_space::{
    dir_to_xi, eta_r_of_point, xi_to_dir, OrientedLine, Point3,
};
use crate::scalar::{real, to_f64, Real};
use crate::solver::{multistart, ResidualEval, SearchResult, SolveOptions};
use crate::vec3::Vec3;

/// Closed rectangle in the μ-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamRect<T> {
    pub re_min: T,
    pub re_max: T,
    pub im_min: T,
    pub im_max: T,
}

impl<T: Real> ParamRect<T> {
    pub fn new(re_min: T, re_max: T, im_min: T, im_max: T) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max) {
            return Err(Error::DegenerateInput("empty parameter rectangle"));
        }
        Ok(ParamRect { re_min, re_max, im_min, im_max })
    }

    /// The square [−half, half]².
    pub fn square(half: T) -> Result<Self> {
        Self::new(-half, half, -half, half)
    }

    #[inline]
    pub fn contains(&self, mu: Complex<T>) -> bool {
        self.contains_margin(mu, T::zero())
    }

    #[inline]
    pub fn contains_margin(&self, mu: Complex<T>, margin: T) -> bool {
        mu.re >= self.re_min - margin
            && mu.re <= self.re_max + margin
            && mu.im >= self.im_min - margin
            && mu.im <= self.im_max + margin
    }

    pub fn clamp(&self, mu: Complex<T>) -> Complex<T> {
        Complex::new(
            mu.re.max(self.re_min).min(self.re_max),
            mu.im.max(self.im_min).min(self.im_max),
        )
    }

    pub fn inflated(&self, margin: T) -> Self {
        ParamRect {
            re_min: self.re_min - margin,
            re_max: self.re_max + margin,
            im_min: self.im_min - margin,
            im_max: self.im_max + margin,
        }
    }

    #[inline]
    pub fn extent(&self) -> (T, T) {
        (self.re_max - self.re_min, self.im_max - self.im_min)
    }

    /// Centers of an n×n cell subdivision; used both as Newton seeds and
    /// as interior evaluation grids.
    pub fn grid(&self, n: usize) -> Vec<Complex<T>> {
        let n = n.max(1);
        let (w, h) = self.extent();
        let nf = real::<T>(n as f64);
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            let re = self.re_min + w * (real::<T>(i as f64) + real(0.5)) / nf;
            for j in 0..n {
                let im = self.im_min + h * (real::<T>(j as f64) + real(0.5)) / nf;
                out.push(Complex::new(re, im));
            }
        }
        out
    }
}

/// Which side of the surface the normal points to. For the sphere and
/// ellipsoid, `Outward` is the usual outer normal; for the paraboloid it
/// is the concave side (toward the focus).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Outward,
    Inward,
}

impl Orientation {
    #[inline]
    pub(crate) fn sign<T: Real>(self) -> T {
        match self {
            Orientation::Outward => T::one(),
            Orientation::Inward => -T::one(),
        }
    }
}

pub type ChartFn<T> = dyn Fn(Complex<T>) -> Vec3<T> + Send + Sync;
pub type NormalFn<T> = dyn Fn(Complex<T>) -> Vec3<T> + Send + Sync;
pub type ImplicitFn<T> = dyn Fn(Vec3<T>) -> T + Send + Sync;
pub type InverseFn<T> = dyn Fn(Vec3<T>) -> Complex<T> + Send + Sync;

/// Shape data for the surface catalog.
#[derive(Clone)]
pub enum SurfaceKind<T> {
    Plane {
        base: Vec3<T>,
        /// Unit normal; doubles as the orientation.
        normal: Vec3<T>,
        e1: Vec3<T>,
        e2: Vec3<T>,
    },
    Sphere {
        center: Vec3<T>,
        radius: T,
        orientation: Orientation,
    },
    Paraboloid {
        vertex: Vec3<T>,
        /// Unit symmetry axis, pointing to the open (concave) side.
        axis: Vec3<T>,
        e1: Vec3<T>,
        e2: Vec3<T>,
        focal: T,
        orientation: Orientation,
    },
    Ellipsoid {
        center: Vec3<T>,
        semi: [T; 3],
        orientation: Orientation,
    },
    Parametric {
        chart: Arc<ChartFn<T>>,
        normal: Option<Arc<NormalFn<T>>>,
        /// Signed scalar field vanishing on the surface; required by the
        /// vector-geometry intersection oracle.
        implicit: Option<Arc<ImplicitFn<T>>>,
        /// Inverse of the chart map for points on the surface; when
        /// absent, inversion falls back to Gauss–Newton.
        inverse: Option<Arc<InverseFn<T>>>,
        /// Negate the (∂u chart) × (∂v chart) normal.
        flip: bool,
    },
}

impl<T> fmt::Debug for SurfaceKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SurfaceKind::Plane { .. } => "Plane",
            SurfaceKind::Sphere { .. } => "Sphere",
            SurfaceKind::Paraboloid { .. } => "Paraboloid",
            SurfaceKind::Ellipsoid { .. } => "Ellipsoid",
            SurfaceKind::Parametric { .. } => "Parametric",
        };
        f.write_str(name)
    }
}

/// One sample of a surface's normal congruence.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceFrame<T> {
    pub mu: Complex<T>,
    /// Chart value of the oriented normal.
    pub xi0: Complex<T>,
    /// Displacement coordinate of the normal line.
    pub eta0: Complex<T>,
    /// Affine parameter of the surface point along its normal line.
    pub r0: T,
    pub foot: Point3<T>,
}

/// An oriented C¹ mirror patch.
#[derive(Clone, Debug)]
pub struct MirrorSurface<T> {
    pub kind: SurfaceKind<T>,
    pub domain: ParamRect<T>,
}

fn validated_unit<T: Real>(v: Vec3<T>, what: &'static str) -> Result<Vec3<T>> {
    let n = v.norm();
    if (n - T::one()).abs() > crate::line_space::dir_norm_tol::<T>() {
        return Err(Error::DegenerateInput(what));
    }
    Ok(v / n)
}

impl<T: Real> MirrorSurface<T> {
    pub fn plane(base: Vec3<T>, normal: Vec3<T>, domain: ParamRect<T>) -> Result<Self> {
        let normal = validated_unit(normal, "plane normal is not unit-norm")?;
        dir_to_xi(normal)?;
        let (e1, e2) = normal.orthonormal_complement();
        Ok(MirrorSurface {
            kind: SurfaceKind::Plane { base, normal, e1, e2 },
            domain,
        })
    }

    pub fn sphere(
        center: Vec3<T>,
        radius: T,
        orientation: Orientation,
        domain: ParamRect<T>,
    ) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::DegenerateInput("sphere radius must be positive"));
        }
        Ok(MirrorSurface {
            kind: SurfaceKind::Sphere { center, radius, orientation },
            domain,
        })
    }

    pub fn paraboloid(
        vertex: Vec3<T>,
        axis: Vec3<T>,
        focal: T,
        orientation: Orientation,
        domain: ParamRect<T>,
    ) -> Result<Self> {
        if !(focal > T::zero()) {
            return Err(Error::DegenerateInput("focal length must be positive"));
        }
        let axis = validated_unit(axis, "paraboloid axis is not unit-norm")?;
        let (e1, e2) = axis.orthonormal_complement();
        Ok(MirrorSurface {
            kind: SurfaceKind::Paraboloid { vertex, axis, e1, e2, focal, orientation },
            domain,
        })
    }

    pub fn ellipsoid(
        center: Vec3<T>,
        semi: [T; 3],
        orientation: Orientation,
        domain: ParamRect<T>,
    ) -> Result<Self> {
        if !semi.iter().all(|s| *s > T::zero()) {
            return Err(Error::DegenerateInput("ellipsoid semi-axes must be positive"));
        }
        Ok(MirrorSurface {
            kind: SurfaceKind::Ellipsoid { center, semi, orientation },
            domain,
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn parametric(
        chart: Arc<ChartFn<T>>,
        normal: Option<Arc<NormalFn<T>>>,
        implicit: Option<Arc<ImplicitFn<T>>>,
        inverse: Option<Arc<InverseFn<T>>>,
        flip: bool,
        domain: ParamRect<T>,
    ) -> Self {
        MirrorSurface {
            kind: SurfaceKind::Parametric { chart, normal, implicit, inverse, flip },
            domain,
        }
    }

    /// Surface point and oriented unit normal at μ, with no domain check.
    pub fn point_normal_at(&self, mu: Complex<T>) -> Result<(Vec3<T>, Vec3<T>)> {
        match &self.kind {
            SurfaceKind::Plane { base, normal, e1, e2 } => {
                let p = *base + *e1 * mu.re + *e2 * mu.im;
                Ok((p, *normal))
            }
            SurfaceKind::Sphere { center, radius, orientation } => {
                let n = xi_to_dir(mu);
                let p = *center + n * (*radius * orientation.sign::<T>());
                Ok((p, n))
            }
            SurfaceKind::Paraboloid { vertex, axis, e1, e2, focal, orientation } => {
                let (a, b) = (mu.re, mu.im);
                let four_f = real::<T>(4.0) * *focal;
                let p = *vertex + *e1 * a + *e2 * b + *axis * ((a * a + b * b) / four_f);
                let two_f = real::<T>(2.0) * *focal;
                let raw = *axis - *e1 * (a / two_f) - *e2 * (b / two_f);
                let n = raw.normalized() * orientation.sign::<T>();
                Ok((p, n))
            }
            SurfaceKind::Ellipsoid { center, semi, orientation } => {
                let n = xi_to_dir(mu);
                let n_out = n * orientation.sign::<T>();
                let [a, b, c] = *semi;
                let scaled = Vec3::new(a * a * n_out.x, b * b * n_out.y, c * c * n_out.z);
                let k = (a * a * n_out.x * n_out.x
                    + b * b * n_out.y * n_out.y
                    + c * c * n_out.z * n_out.z)
                    .sqrt();
                Ok((*center + scaled / k, n))
            }
            SurfaceKind::Parametric { chart, normal, flip, .. } => {
                let p = chart(mu);
                let n_raw = match normal {
                    Some(nf) => nf(mu),
                    None => {
                        let h = real::<T>(1e-6) * mu.norm().max(T::one());
                        let du = (chart(mu + Complex::new(h, T::zero()))
                            - chart(mu - Complex::new(h, T::zero())))
                            / (real::<T>(2.0) * h);
                        let dv = (chart(mu + Complex::new(T::zero(), h))
                            - chart(mu - Complex::new(T::zero(), h)))
                            / (real::<T>(2.0) * h);
                        du.cross(dv)
                    }
                };
                let len = n_raw.norm();
                if !(len > T::zero()) || !len.is_finite() {
                    return Err(Error::DegenerateInput("parametric chart has degenerate normal"));
                }
                let n = if *flip { -(n_raw / len) } else { n_raw / len };
                Ok((p, n))
            }
        }
    }

    /// Normal congruence sample at μ without the domain-membership check;
    /// root searches evaluate slightly outside the rectangle.
    pub(crate) fn frame_at_unclamped(&self, mu: Complex<T>) -> Result<SurfaceFrame<T>> {
        let (p, n) = self.point_normal_at(mu)?;
        let xi0 = match &self.kind {
            // μ is the normal chart value by construction; reusing it
            // avoids a pointless round trip through the unit sphere.
            SurfaceKind::Sphere { .. } | SurfaceKind::Ellipsoid { .. } => {
                if mu.norm_sqr() > real::<T>(1e12) {
                    return Err(Error::ChartExcluded);
                }
                mu
            }
            _ => dir_to_xi(n)?,
        };
        let foot = Point3::from_vec3(p);
        let (eta0, r0) = eta_r_of_point(xi0, foot);
        Ok(SurfaceFrame { mu, xi0, eta0, r0, foot })
    }

    /// Normal congruence sample at μ.
    pub fn frame_at(&self, mu: Complex<T>) -> Result<SurfaceFrame<T>> {
        if !self.domain.contains(mu) {
            return Err(Error::OutOfDomain);
        }
        self.frame_at_unclamped(mu)
    }

    /// Inverse parameterization for a point on (or near) the surface.
    /// Returns `None` where the inversion is undefined, e.g. a normal in
    /// the excluded chart cap.
    pub fn mu_of_point(&self, p: Vec3<T>) -> Option<Complex<T>> {
        match &self.kind {
            SurfaceKind::Plane { base, e1, e2, .. } => {
                let d = p - *base;
                Some(Complex::new(d.dot(*e1), d.dot(*e2)))
            }
            SurfaceKind::Sphere { center, orientation, .. } => {
                let v = p - *center;
                let len = v.norm();
                if !(len > T::zero()) {
                    return None;
                }
                dir_to_xi(v * (orientation.sign::<T>() / len)).ok()
            }
            SurfaceKind::Paraboloid { vertex, e1, e2, .. } => {
                let d = p - *vertex;
                Some(Complex::new(d.dot(*e1), d.dot(*e2)))
            }
            SurfaceKind::Ellipsoid { center, semi, orientation } => {
                let v = p - *center;
                let [a, b, c] = *semi;
                let g = Vec3::new(v.x / (a * a), v.y / (b * b), v.z / (c * c));
                let len = g.norm();
                if !(len > T::zero()) {
                    return None;
                }
                dir_to_xi(g * (orientation.sign::<T>() / len)).ok()
            }
            SurfaceKind::Parametric { chart, inverse, .. } => {
                if let Some(inv) = inverse {
                    return Some(inv(p));
                }
                // Gauss–Newton on |chart(μ) − p|² from the best grid seed.
                let mut best = Complex::new(T::zero(), T::zero());
                let mut best_d = T::infinity();
                for mu in self.domain.grid(12) {
                    let d = (chart(mu) - p).norm_sqr();
                    if d < best_d {
                        best_d = d;
                        best = mu;
                    }
                }
                let mut mu = best;
                for _ in 0..25 {
                    let f0 = chart(mu) - p;
                    if f0.norm() < real::<T>(1e-11) * p.norm().max(T::one()) {
                        return Some(mu);
                    }
                    let h = real::<T>(1e-6) * mu.norm().max(T::one());
                    let du = (chart(mu + Complex::new(h, T::zero()))
                        - chart(mu - Complex::new(h, T::zero())))
                        / (real::<T>(2.0) * h);
                    let dv = (chart(mu + Complex::new(T::zero(), h))
                        - chart(mu - Complex::new(T::zero(), h)))
                        / (real::<T>(2.0) * h);
                    // Normal equations of the 3×2 least-squares step.
                    let (a11, a12, a22) = (du.dot(du), du.dot(dv), dv.dot(dv));
                    let (b1, b2) = (-du.dot(f0), -dv.dot(f0));
                    let det = a11 * a22 - a12 * a12;
                    if det.abs() < real(1e-30) {
                        return None;
                    }
                    mu = mu + Complex::new((b1 * a22 - b2 * a12) / det, (b2 * a11 - b1 * a12) / det);
                }
                let f0 = chart(mu) - p;
                if f0.norm() < real::<T>(1e-8) * p.norm().max(T::one()) {
                    Some(mu)
                } else {
                    None
                }
            }
        }
    }
}

/// Displacement coordinate of the line with direction ξ through the
/// frame's foot point, computed from the congruence data alone:
///
/// η = (1+ξ̄₀ξ)²η₀/(1+ξ₀ξ̄₀)² − (ξ₀−ξ)²η̄₀/(1+ξ₀ξ̄₀)² + (ξ₀−ξ)(1+ξ̄₀ξ)r₀/(1+ξ₀ξ̄₀)
pub fn us_eta<T: Real>(frame: &SurfaceFrame<T>, xi: Complex<T>) -> Complex<T> {
    let (t1, t2, t3) = us_eta_terms(frame, xi);
    t1 + t2 + t3
}

fn us_eta_terms<T: Real>(
    frame: &SurfaceFrame<T>,
    xi: Complex<T>,
) -> (Complex<T>, Complex<T>, Complex<T>) {
    let xi0 = frame.xi0;
    let one_u0 = T::one() + xi0.norm_sqr();
    let a = Complex::<T>::one() + xi0.conj() * xi;
    let b = xi0 - xi;
    let t1 = a * a * frame.eta0 / (one_u0 * one_u0);
    let t2 = -(b * b * frame.eta0.conj()) / (one_u0 * one_u0);
    let t3 = b * a * (frame.r0 / one_u0);
    (t1, t2, t3)
}

/// Integrability residual of an arbitrary sampled line congruence
/// μ ↦ (ξ, η, r): ∂r − (2η̄ ∂ξ + 2η ∂ξ̄)/(1+ξξ̄)², with ∂ = ∂/∂μ taken by
/// central finite differences of step h. Normal congruences make this
/// vanish; the residual is the obstruction to the congruence being
/// orthogonal to any surface.
pub fn congruence_residual<T, F>(congruence: F, mu: Complex<T>, h: T) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(Complex<T>) -> Result<(Complex<T>, Complex<T>, T)>,
{
    let (xi_c, eta_c, _) = congruence(mu)?;
    let (xi_pr, _, r_pr) = congruence(mu + Complex::new(h, T::zero()))?;
    let (xi_mr, _, r_mr) = congruence(mu - Complex::new(h, T::zero()))?;
    let (xi_pi, _, r_pi) = congruence(mu + Complex::new(T::zero(), h))?;
    let (xi_mi, _, r_mi) = congruence(mu - Complex::new(T::zero(), h))?;
    let four_h = real::<T>(4.0) * h;
    let d = |p: Complex<T>, m: Complex<T>, pi: Complex<T>, mi: Complex<T>| {
        ((p - m) - Complex::<T>::i() * (pi - mi)) / four_h
    };
    let d_xi = d(xi_pr, xi_mr, xi_pi, xi_mi);
    let d_xibar = d(xi_pr.conj(), xi_mr.conj(), xi_pi.conj(), xi_mi.conj());
    let d_r = d(
        Complex::new(r_pr, T::zero()),
        Complex::new(r_mr, T::zero()),
        Complex::new(r_pi, T::zero()),
        Complex::new(r_mi, T::zero()),
    );
    let w = T::one() + xi_c.norm_sqr();
    let two = real::<T>(2.0);
    Ok(d_r - (eta_c.conj() * d_xi + eta_c * d_xibar) * (two / (w * w)))
}

/// Integrability residual of the surface's own normal congruence at μ.
/// All four stencil points must stay inside the parameter rectangle.
pub fn integrability_residual<T: Real>(
    surface: &MirrorSurface<T>,
    mu: Complex<T>,
    h: T,
) -> Result<Complex<T>> {
    if !surface.domain.contains_margin(mu, -h) {
        return Err(Error::OutOfDomain);
    }
    congruence_residual(
        |m| {
            let f = surface.frame_at_unclamped(m)?;
            Ok((f.xi0, f.eta0, f.r0))
        },
        mu,
        h,
    )
}

/// All parameter values where the oriented line meets the surface patch,
/// found by a multistart search of η = us_eta(frame(μ), ξ). An `Ok` empty
/// list is a certified miss at the search resolution; a landscape that
/// dips without converging is a solver failure.
pub fn line_hits_surface<T: Real>(
    surface: &MirrorSurface<T>,
    line: &OrientedLine<T>,
    opts: &SolveOptions<T>,
) -> Result<Vec<SurfaceFrame<T>>> {
    let xi = line.xi();
    let eta = line.eta();
    let (w, hgt) = surface.domain.extent();
    let allowed = surface.domain.inflated(real::<T>(0.5) * w.max(hgt).max(T::one()));
    let f = |x: &[T; 2]| {
        let mu = Complex::new(x[0], x[1]);
        if !allowed.contains(mu) {
            return None;
        }
        let frame = surface.frame_at_unclamped(mu).ok()?;
        let (t1, t2, t3) = us_eta_terms(&frame, xi);
        let diff = t1 + t2 + t3 - eta;
        let scale = T::one()
            .max(eta.norm())
            .max(t1.norm())
            .max(t2.norm())
            .max(t3.norm());
        Some(ResidualEval { raw: [diff.re, diff.im], scale: [scale, scale] })
    };
    let seeds: Vec<[T; 2]> = surface
        .domain
        .grid(opts.grid)
        .into_iter()
        .map(|m| [m.re, m.im])
        .collect();
    let margin = real::<T>(1e-9);
    let in_rect =
        |x: &[T; 2]| surface.domain.contains_margin(Complex::new(x[0], x[1]), margin);
    match multistart(&f, &seeds, &in_rect, opts) {
        SearchResult::Roots(roots) => {
            let mut frames = Vec::with_capacity(roots.len());
            for r in roots {
                let mu = surface.domain.clamp(Complex::new(r.x[0], r.x[1]));
                frames.push(surface.frame_at(mu)?);
            }
            Ok(frames)
        }
        SearchResult::VerifiedEmpty { .. } => Ok(Vec::new()),
        SearchResult::Failed { best_residual } => Err(Error::SolverFailure {
            best_residual: to_f64(best_residual),
        }),
    }
}
