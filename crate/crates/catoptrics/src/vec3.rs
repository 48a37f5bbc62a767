//! Minimal 3-vector used for directions, points and surface frames.
//!
//! The crate needs only a handful of Euclidean operations, so a small
//! purpose-built type keeps the scalar generics simple and avoids dragging a
//! linear-algebra dependency through the public API.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::{real, Real};

/// Euclidean 3-vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    #[inline]
    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Vec3::new(T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn cross(self, other: Self) -> Self {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    #[inline]
    pub fn norm_sqr(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Unit vector in the direction of `self`. Caller must ensure a nonzero
    /// argument; a zero vector produces NaNs rather than a panic.
    #[inline]
    pub fn normalized(self) -> Self {
        self / self.norm()
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    /// Distance from `self` to `other`.
    #[inline]
    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    /// Componentwise conversion from `f64` coordinates.
    #[inline]
    pub fn from_f64(x: f64, y: f64, z: f64) -> Self {
        Vec3::new(real(x), real(y), real(z))
    }

    /// Deterministic right-handed orthonormal basis (e₁, e₂) of the plane
    /// perpendicular to the unit vector `self`, with e₁ built from the x
    /// axis unless `self` is too close to it. For `self = ẑ` this yields
    /// exactly (x̂, ŷ).
    pub fn orthonormal_complement(self) -> (Self, Self) {
        let reference = if self.x.abs() <= real(0.9) {
            Vec3::new(T::one(), T::zero(), T::zero())
        } else {
            Vec3::new(T::zero(), T::one(), T::zero())
        };
        let e1 = (reference - self * reference.dot(self)).normalized();
        let e2 = self.cross(e1);
        (e1, e2)
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Real> Div<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}
