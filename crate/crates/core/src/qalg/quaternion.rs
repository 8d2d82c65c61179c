use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::{FieldKind, Real, Scalar};
use crate::{Error, Result};

/// `w + x i + y j + z k` with `ij = -ji = k`, `i^2 = j^2 = k^2 = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quaternion<T> {
    pub const fn new(w: T, x: T, y: T, z: T) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    /// Complex numbers sit inside the quaternions as `re + im i`.
    pub fn from_complex(c: Complex<T>) -> Self {
        Self::new(c.re, c.im, T::zero(), T::zero())
    }

    /// Symplectic split `q = c1 + c2 j` with `c1 = w + x i`, `c2 = y + z i`.
    ///
    /// Equivalently `q = c1 + j conj(c2)`, since `c j = j conj(c)`.
    pub fn split(self) -> (Complex<T>, Complex<T>) {
        (Complex::new(self.w, self.x), Complex::new(self.y, self.z))
    }

    pub fn from_split(c1: Complex<T>, c2: Complex<T>) -> Self {
        Self::new(c1.re, c1.im, c2.re, c2.im)
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> T {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    /// `conj(q) / |q|^2`.
    pub fn try_inv(self) -> Result<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return Err(Error::Domain("inverse of the zero quaternion".into()));
        }
        Ok(self.conj().scale(T::one() / n))
    }

    pub fn scale(self, r: T) -> Self {
        Self::new(self.w * r, self.x * r, self.y * r, self.z * r)
    }

    /// Vector (imaginary) part is zero.
    pub fn is_real(self, tol: T) -> bool {
        self.x.abs() <= tol && self.y.abs() <= tol && self.z.abs() <= tol
    }
}

impl<T: Real> Add for Quaternion<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Quaternion<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Quaternion<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Quaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a1, b1, c1, d1) = (self.w, self.x, self.y, self.z);
        let (a2, b2, c2, d2) = (o.w, o.x, o.y, o.z);
        Self::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl<T: Real> Zero for Quaternion<T> {
    fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }
    fn is_zero(&self) -> bool {
        self.w.is_zero() && self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }
}

impl<T: Real> One for Quaternion<T> {
    fn one() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::zero())
    }
}

impl<T: Real> fmt::Display for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.w, self.x, self.y, self.z)
    }
}

impl<T: Real> Scalar for Quaternion<T> {
    type Real = T;
    const FIELD: FieldKind = FieldKind::Quaternionic;
    const REAL_DIM: usize = 4;

    fn from_real(r: T) -> Self {
        Self::new(r, T::zero(), T::zero(), T::zero())
    }
    fn conj(self) -> Self {
        Quaternion::conj(self)
    }
    fn norm_sqr(self) -> T {
        Quaternion::norm_sqr(self)
    }
    fn re(self) -> T {
        self.w
    }
    fn inv(self) -> Option<Self> {
        self.try_inv().ok()
    }
    fn component(self, k: usize) -> T {
        match k {
            0 => self.w,
            1 => self.x,
            2 => self.y,
            _ => self.z,
        }
    }
    fn from_components(c: &[T]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }
    fn scale(self, r: T) -> Self {
        Quaternion::scale(self, r)
    }
}
