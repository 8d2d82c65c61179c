//! Geometric formulation on `R^2n` with coordinates `(q_1..q_n, p_1..p_n)`.

pub mod darboux;
pub mod fields;
pub mod lie;
pub mod structures;
pub mod twolevel;

pub use darboux::*;
pub use fields::*;
pub use lie::*;
pub use structures::*;
pub use twolevel::*;
