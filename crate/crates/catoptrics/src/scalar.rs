//! Scalar abstraction for the whole crate.
//!
//! Everything downstream is generic over [`Real`] so the same code runs in
//! `f32` and `f64`. The trait is a thin bundle of the num-traits capabilities
//! we actually use plus the marker bounds needed to thread scalars through
//! closures and error payloads.

use std::fmt::{Debug, Display};

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Shorthand for injecting an `f64` literal into a generic scalar.
///
/// Panics if the conversion fails, which for the intended `f32`/`f64`
/// instantiations it never does.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Best-effort conversion back to `f64` for diagnostics and error payloads.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
