//! Alternative Hermitian structures on finite-dimensional quantum systems.
//!
//! * [`qalg`]: quaternions, dense matrices over R, C, H, complex counterpart,
//!   Hermitian eigensolvers.
//! * [`hermpair`]: connecting operator of two Hermitian forms, genericity
//!   tests, bi-unitary groups, commutants.
//! * [`defalg`]: the deformed product `A o_K B = A K B` and its companions.
//! * [`geomqm`]: tensor fields on `R^2n`, the lambda-deformed oscillator
//!   structures and the two-level function algebra.
//! * [`qdyn`]: the quaternionic two-level system.
//!
//! Numerics are generic over `f32`/`f64`; the aliases below fix `f64`.

pub mod checks;
pub mod defalg;
pub mod error;
pub mod geomqm;
pub mod hermpair;
pub mod qalg;
pub mod qdyn;
pub mod random;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{FieldKind, HilbertScalar, Real, Scalar};

pub type Quat = qalg::Quaternion<f64>;
pub type C64 = num_complex::Complex64;
pub type QMatrix = qalg::Matrix<Quat>;
pub type CMatrix = qalg::Matrix<C64>;
pub type RMatrix = qalg::Matrix<f64>;
