//! Charts on the space of oriented lines.
//!
//! An oriented line in Euclidean 3-space is encoded by a pair of complex
//! numbers (ξ, η): ξ is the stereographic chart value of the direction
//! (projection from the south pole, ξ = tan(θ/2)e^{iφ}) and η encodes the
//! perpendicular displacement of the line from the origin as a tangent
//! vector to the direction sphere. Points of ℝ³ are split as (z, t) with
//! z = x¹ + ix² and t = x³.
//!
//! The crate works in this single chart and reports directions inside a
//! small cap around the south pole as [`Error::ChartExcluded`] instead of
//! switching charts; scenes can be rigidly rotated beforehand to keep the
//! relevant directions away from the cap.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{real, Real};
use crate::vec3::Vec3;

/// Chart validity bound: |ξ| beyond this counts as the excluded south cap.
pub const CHART_CAP: f64 = 1e6;

/// Directions whose norm deviates from 1 by more than this are rejected;
/// smaller deviations are silently renormalized.  At scalar types too
/// narrow to represent this bound the working tolerance is floored at a
/// few dozen ulps.
pub const DIR_NORM_TOL: f64 = 1e-8;

#[inline]
fn cap<T: Real>() -> T {
    real(CHART_CAP)
}

#[inline]
pub(crate) fn dir_norm_tol<T: Real>() -> T {
    real::<T>(DIR_NORM_TOL).max(T::epsilon() * real(32.0))
}

/// A point of ℝ³ in the (z, t) complex-plus-real split.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point3<T> {
    pub z: Complex<T>,
    pub t: T,
}

impl<T: Real> Point3<T> {
    #[inline]
    pub fn new(z: Complex<T>, t: T) -> Self {
        Point3 { z, t }
    }

    #[inline]
    pub fn origin() -> Self {
        Point3::new(Complex::new(T::zero(), T::zero()), T::zero())
    }

    #[inline]
    pub fn from_vec3(v: Vec3<T>) -> Self {
        Point3::new(Complex::new(v.x, v.y), v.z)
    }

    #[inline]
    pub fn to_vec3(self) -> Vec3<T> {
        Vec3::new(self.z.re, self.z.im, self.t)
    }

    /// Euclidean distance to the origin.
    #[inline]
    pub fn norm(self) -> T {
        (self.z.norm_sqr() + self.t * self.t).sqrt()
    }

    #[inline]
    pub fn distance(self, other: Self) -> T {
        ((self.z - other.z).norm_sqr() + (self.t - other.t) * (self.t - other.t)).sqrt()
    }
}

/// An oriented line in chart coordinates. `xi` is kept outside the south
/// exclusion cap by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedLine<T> {
    xi: Complex<T>,
    eta: Complex<T>,
}

impl<T: Real> OrientedLine<T> {
    /// Builds a line from chart coordinates, rejecting directions in the
    /// exclusion cap.
    pub fn new(xi: Complex<T>, eta: Complex<T>) -> Result<Self> {
        if xi.norm_sqr() > cap::<T>() * cap::<T>() {
            return Err(Error::ChartExcluded);
        }
        Ok(OrientedLine { xi, eta })
    }

    #[inline]
    pub fn xi(&self) -> Complex<T> {
        self.xi
    }

    #[inline]
    pub fn eta(&self) -> Complex<T> {
        self.eta
    }
}

/// A point on an oriented line, given by the affine parameter r measured
/// from the line's closest point to the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinePointParam<T> {
    pub line: OrientedLine<T>,
    pub r: T,
}

/// Chart value of a unit direction vector.
///
/// The input is renormalized when its norm is within [`DIR_NORM_TOL`] of 1
/// and rejected otherwise.
pub fn dir_to_xi<T: Real>(unit3: Vec3<T>) -> Result<Complex<T>> {
    let n = unit3.norm();
    if (n - T::one()).abs() > dir_norm_tol::<T>() {
        return Err(Error::DegenerateInput("direction vector is not unit-norm"));
    }
    let d = unit3 / n;
    // |ξ|² = (1 − z)/(1 + z); excluded iff that exceeds the squared cap.
    let denom = T::one() + d.z;
    if denom <= T::zero() || T::one() - d.z > cap::<T>() * cap::<T>() * denom {
        return Err(Error::ChartExcluded);
    }
    Ok(Complex::new(d.x / denom, d.y / denom))
}

/// Unit direction vector of a chart value; exact inverse of [`dir_to_xi`]
/// on its domain.
pub fn xi_to_dir<T: Real>(xi: Complex<T>) -> Vec3<T> {
    let u = xi.norm_sqr();
    let denom = T::one() + u;
    let two = real::<T>(2.0);
    Vec3::new(
        two * xi.re / denom,
        two * xi.im / denom,
        (T::one() - u) / denom,
    )
}

/// Antipodal direction in chart coordinates: −1/ξ̄.
///
/// The antipode of a direction near the north pole lies in the excluded
/// cap, so small |ξ| is an error rather than an overflow.
pub fn antipode<T: Real>(xi: Complex<T>) -> Result<Complex<T>> {
    let u = xi.norm_sqr();
    if u * cap::<T>() * cap::<T>() < T::one() {
        return Err(Error::ChartExcluded);
    }
    Ok(-xi / u)
}

/// Chordal distance between two directions given by chart values:
/// 2|ξ₁−ξ₂|/√((1+|ξ₁|²)(1+|ξ₂|²)), which equals |d₁ − d₂| for the
/// corresponding unit vectors.
pub fn chordal<T: Real>(a: Complex<T>, b: Complex<T>) -> T {
    let two = real::<T>(2.0);
    two * (a - b).norm() / ((T::one() + a.norm_sqr()) * (T::one() + b.norm_sqr())).sqrt()
}

/// Incidence map: the point of ℝ³ lying at affine parameter r on the line.
///
/// z = [2(η − η̄ξ²) + 2ξ(1+ξξ̄)r] / (1+ξξ̄)²
/// t = [−2(ηξ̄ + η̄ξ) + (1−(ξξ̄)²)r] / (1+ξξ̄)²
pub fn phi<T: Real>(lp: LinePointParam<T>) -> Point3<T> {
    let xi = lp.line.xi;
    let eta = lp.line.eta;
    let r = lp.r;
    let u = xi.norm_sqr();
    let one_u = T::one() + u;
    let denom = one_u * one_u;
    let two = real::<T>(2.0);
    let z = ((eta - eta.conj() * xi * xi) * two + xi * (two * one_u * r)) / denom;
    let t = (-two * two * (eta * xi.conj()).re + (T::one() - u * u) * r) / denom;
    Point3::new(z, t)
}

/// Inverse of the incidence map for a fixed direction: the (η, r) of the
/// line with direction chart value ξ through the point p.
///
/// η = ½(z − 2tξ − z̄ξ²),  r = (ξz̄ + ξ̄z + (1−ξξ̄)t) / (1+ξξ̄)
pub fn eta_r_of_point<T: Real>(xi: Complex<T>, p: Point3<T>) -> (Complex<T>, T) {
    let two = real::<T>(2.0);
    let half = real::<T>(0.5);
    let u = xi.norm_sqr();
    let eta = (p.z - xi * (two * p.t) - p.z.conj() * xi * xi) * half;
    let r = (two * (xi * p.z.conj()).re + (T::one() - u) * p.t) / (T::one() + u);
    (eta, r)
}

/// The oriented line through p toward q, with the affine parameters of
/// both endpoints on it.
pub fn line_through_points<T: Real>(
    p: Point3<T>,
    q: Point3<T>,
) -> Result<(OrientedLine<T>, T, T)> {
    let delta = q.to_vec3() - p.to_vec3();
    let len = delta.norm();
    if len < real(1e-12) {
        return Err(Error::DegenerateInput("coincident points"));
    }
    let xi = dir_to_xi(delta / len)?;
    let (eta, r_p) = eta_r_of_point(xi, p);
    let (_, r_q) = eta_r_of_point(xi, q);
    Ok((OrientedLine::new(xi, eta)?, r_p, r_q))
}

/// The oriented line through p with direction chart value ξ, plus p's
/// affine parameter on it.
pub fn line_from_point_xi<T: Real>(xi: Complex<T>, p: Point3<T>) -> Result<(OrientedLine<T>, T)> {
    let (eta, r) = eta_r_of_point(xi, p);
    Ok((OrientedLine::new(xi, eta)?, r))
}
