//! Scalar towers.
//!
//! Everything numeric in this crate is generic over a real type `T: Real`
//! (`f32` or `f64`). Matrix code is additionally generic over a [`Scalar`],
//! which is either the real type itself, `Complex<T>`, or
//! [`Quaternion<T>`](crate::qalg::Quaternion). All three are treated as
//! real algebras with a fixed basis so that linear problems over them can be
//! realified and solved with real machinery.

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Floating point: f32 or f64.
pub trait Real:
    Scalar<Real = Self>
    + Float
    + FloatConst + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + std::fmt::LowerExp
{
    /// Literal conversion; every constant in this crate fits in f32.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Which division algebra a scalar lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Real,
    Complex,
    Quaternionic,
}

impl FieldKind {
    pub fn real_dim(self) -> usize {
        match self {
            FieldKind::Real => 1,
            FieldKind::Complex => 2,
            FieldKind::Quaternionic => 4,
        }
    }
}

impl Display for FieldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FieldKind::Real => "real",
            FieldKind::Complex => "complex",
            FieldKind::Quaternionic => "quaternionic",
        };
        f.write_str(s)
    }
}

/// A finite-dimensional associative division algebra over `Self::Real`
/// with an involution (conjugation) and a fixed real basis.
///
/// Multiplication need not commute.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    type Real: Real;

    const FIELD: FieldKind;
    /// Number of real components (1, 2 or 4).
    const REAL_DIM: usize;

    fn from_real(r: Self::Real) -> Self;
    fn conj(self) -> Self;
    fn norm_sqr(self) -> Self::Real;
    /// Real part (coefficient of the unit).
    fn re(self) -> Self::Real;
    /// Multiplicative inverse, `None` for zero.
    fn inv(self) -> Option<Self>;
    /// Real component `k` in the fixed basis (`0 <= k < REAL_DIM`).
    fn component(self, k: usize) -> Self::Real;
    /// Inverse of [`Scalar::component`]; `c.len() == REAL_DIM`.
    fn from_components(c: &[Self::Real]) -> Self;

    fn modulus(self) -> Self::Real {
        self.norm_sqr().sqrt()
    }

    fn scale(self, r: Self::Real) -> Self {
        self * Self::from_real(r)
    }

    /// Basis element `k` of the algebra as a real vector space.
    fn unit(k: usize) -> Self {
        let mut c = [Self::Real::zero(); 4];
        c[k] = Self::Real::one();
        Self::from_components(&c[..Self::REAL_DIM])
    }

    fn components(self) -> Vec<Self::Real> {
        (0..Self::REAL_DIM).map(|k| self.component(k)).collect()
    }
}

macro_rules! impl_real_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;
            const FIELD: FieldKind = FieldKind::Real;
            const REAL_DIM: usize = 1;

            fn from_real(r: $t) -> Self {
                r
            }
            fn conj(self) -> Self {
                self
            }
            fn norm_sqr(self) -> $t {
                self * self
            }
            fn re(self) -> $t {
                self
            }
            fn inv(self) -> Option<Self> {
                if self == 0.0 {
                    None
                } else {
                    Some(1.0 / self)
                }
            }
            fn component(self, _k: usize) -> $t {
                self
            }
            fn from_components(c: &[$t]) -> Self {
                c[0]
            }
        }
    };
}

impl_real_scalar!(f32);
impl_real_scalar!(f64);

impl<T: Real> Scalar for Complex<T> {
    type Real = T;
    const FIELD: FieldKind = FieldKind::Complex;
    const REAL_DIM: usize = 2;

    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    fn norm_sqr(self) -> T {
        Complex::norm_sqr(&self)
    }
    fn re(self) -> T {
        self.re
    }
    fn inv(self) -> Option<Self> {
        if self.re.is_zero() && self.im.is_zero() {
            None
        } else {
            Some(Complex::inv(&self))
        }
    }
    fn component(self, k: usize) -> T {
        if k == 0 {
            self.re
        } else {
            self.im
        }
    }
    fn from_components(c: &[T]) -> Self {
        Complex::new(c[0], c[1])
    }
}

/// Scalars that carry a Hilbert-space theory in this crate: complex numbers
/// and quaternions. Dispatches the operations whose algorithms differ by
/// field (Hermitian eigensolver, rank).
pub trait HilbertScalar: Scalar {
    fn hermitian_eig(
        m: &crate::qalg::Matrix<Self>,
        tol: Self::Real,
    ) -> crate::Result<crate::qalg::EigResult<Self>>;

    /// Rank over the field (right-linear independence of columns for
    /// quaternions).
    fn rank(m: &crate::qalg::Matrix<Self>, rel_threshold: Self::Real) -> usize;
}
