//! Specular reflection as a transformation of oriented lines.
//!
//! Reflection off a mirror with unit normal n sends an incident direction
//! d₁ to d₂ = d₁ − 2(d₁·n)n. In the stereographic chart this becomes a
//! fractional-linear map of ξ₁ with coefficients built from the normal's
//! chart value ξ₀:
//!
//!   ξ₂ = (2ξ₀ξ̄₁ + 1 − ξ₀ξ̄₀) / ((1 − ξ₀ξ̄₀)ξ̄₁ − 2ξ̄₀)
//!
//! The map depends on the mirror only through the *unoriented* normal:
//! replacing ξ₀ by its antipode −1/ξ̄₀ leaves it unchanged, and applying
//! it twice is the identity. `reflect_line` extends the direction law to
//! whole oriented lines by transporting the displacement coordinate and
//! the affine parameter through a reflection event on a surface patch,
//! and `mirror_normal` inverts the law: given an incident/reflected
//! direction pair, it recovers the normal that realizes the reflection.

use num_complex::Complex;
use num_traits::One;

use crate::error::{Error, Result};
use crate::line_space::{phi, LinePointParam, OrientedLine, CHART_CAP};
use crate::scalar::{real, Real};
use crate::surfaces::SurfaceFrame;

/// Chart value of the reflected direction for mirror normal ξ₀ and
/// incident direction ξ₁. Fails with `ChartExcluded` when the reflected
/// direction falls in the excluded cap of the chart (including the pole
/// itself, where the fractional-linear denominator vanishes).
pub fn reflect_direction<T: Real>(xi0: Complex<T>, xi1: Complex<T>) -> Result<Complex<T>> {
    let u0 = xi0.norm_sqr();
    let num = xi0 * xi1.conj() * real::<T>(2.0) + Complex::new(T::one() - u0, T::zero());
    let den = xi1.conj() * (T::one() - u0) - xi0.conj() * real::<T>(2.0);
    if den.norm() <= real(1e-12) {
        return Err(Error::ChartExcluded);
    }
    let xi2 = num / den;
    if xi2.norm_sqr() > real::<T>(CHART_CAP * CHART_CAP) {
        return Err(Error::ChartExcluded);
    }
    Ok(xi2)
}

/// Incident direction that the mirror with normal ξ₀ reflects into ξ₂.
/// Reflection is an involution, so this is the same map again.
pub fn inverse_reflect_direction<T: Real>(xi0: Complex<T>, xi2: Complex<T>) -> Result<Complex<T>> {
    reflect_direction(xi0, xi2)
}

/// A complete reflection event: the incident and reflected oriented
/// lines, the congruence frame of the mirror point, and the affine
/// parameters of that point along both lines.
#[derive(Clone, Copy, Debug)]
pub struct ReflectionEvent<T> {
    pub incoming: OrientedLine<T>,
    pub outgoing: OrientedLine<T>,
    pub frame: SurfaceFrame<T>,
    pub r1: T,
    pub r2: T,
}

/// Reflects an oriented line off the surface point described by `frame`.
/// `r1` is the affine parameter of the mirror point along the incoming
/// line; the line evaluated there must actually pass through the frame's
/// foot. The outgoing displacement and affine parameters are produced by
/// closed-form transport — no point is reconstructed and re-projected:
///
///   η₂ = [(ξ̄₀−ξ̄₁)²η₀ − (1+ξ₀ξ̄₁)²η̄₀ + (ξ̄₀−ξ̄₁)(1+ξ₀ξ̄₁)(1+ξ₀ξ̄₀)r₀] / D²
///   r₂ = r₁ + 2(|ξ₀−ξ₁|² − |1+ξ̄₀ξ₁|²) r₀ / ((1+ξ₀ξ̄₀)(1+ξ₁ξ̄₁))
///
/// with D = (1−ξ₀ξ̄₀)ξ̄₁ − 2ξ̄₀ the same denominator as the direction map.
pub fn reflect_line<T: Real>(
    frame: &SurfaceFrame<T>,
    incoming: &OrientedLine<T>,
    r1: T,
) -> Result<ReflectionEvent<T>> {
    let hit = phi(LinePointParam { line: *incoming, r: r1 });
    let tol = real::<T>(1e-9) * frame.foot.norm().max(T::one());
    if hit.distance(frame.foot) > tol {
        return Err(Error::NotIncident);
    }

    let xi0 = frame.xi0;
    let xi1 = incoming.xi();
    let xi2 = reflect_direction(xi0, xi1)?;

    let u0 = xi0.norm_sqr();
    let one_u0 = T::one() + u0;
    let a = xi0.conj() - xi1.conj();
    let b = Complex::<T>::one() + xi0 * xi1.conj();
    let d = xi1.conj() * (T::one() - u0) - xi0.conj() * real::<T>(2.0);
    let eta2 = (a * a * frame.eta0 - b * b * frame.eta0.conj()
        + a * b * (one_u0 * frame.r0))
        / (d * d);

    let one_u1 = T::one() + xi1.norm_sqr();
    let r2 = r1
        + real::<T>(2.0) * ((xi0 - xi1).norm_sqr() - b.norm_sqr()) * frame.r0
            / (one_u0 * one_u1);

    let outgoing = OrientedLine::new(xi2, eta2)?;
    Ok(ReflectionEvent { incoming: *incoming, outgoing, frame: *frame, r1, r2 })
}

/// Normal direction recovered from an incident/reflected pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MirrorNormal<T> {
    /// Chart value of one of the two unit normals realizing the
    /// reflection (they are antipodal and act identically).
    InChart(Complex<T>),
    /// The realizing normal is the excluded chart direction.
    AtInfinity,
}

/// Solves the reflection law for the mirror normal:
///
///   ξ₀ = [ξ₁ξ̄₁ − ξ₂ξ̄₂ + |ξ₁−ξ₂| √((1+ξ₁ξ̄₁)(1+ξ₂ξ̄₂))] / [ξ̄₁(1+ξ₂ξ̄₂) − ξ̄₂(1+ξ₁ξ̄₁)]
///
/// The numerator is real and nonnegative. Coincident directions admit a
/// whole circle of normals and are rejected as degenerate.
pub fn mirror_normal<T: Real>(xi1: Complex<T>, xi2: Complex<T>) -> Result<MirrorNormal<T>> {
    if (xi1 - xi2).norm() < real(1e-12) {
        return Err(Error::DegenerateInput(
            "coincident directions do not determine a mirror normal",
        ));
    }
    let u1 = xi1.norm_sqr();
    let u2 = xi2.norm_sqr();
    let num = u1 - u2 + (xi1 - xi2).norm() * ((T::one() + u1) * (T::one() + u2)).sqrt();
    let den = xi1.conj() * (T::one() + u2) - xi2.conj() * (T::one() + u1);
    if den.norm() <= real::<T>(1e-12) * num.abs().max(T::one()) {
        return Ok(MirrorNormal::AtInfinity);
    }
    let xi0 = Complex::new(num, T::zero()) / den;
    if xi0.norm_sqr() > real::<T>(CHART_CAP * CHART_CAP) {
        return Ok(MirrorNormal::AtInfinity);
    }
    Ok(MirrorNormal::InChart(xi0))
}
