//! Quaternions and dense matrices over the reals, complexes and quaternions.

mod counterpart;
mod eigen;
mod json;
mod linalg;
mod matrix;
mod quaternion;

pub use counterpart::{
    complex_counterpart, complex_to_quaternionic, from_complex_counterpart, qrank, vandermonde_counterpart_det,
    vector_from_counterpart, vector_to_counterpart, VandermondeCheck,
};
pub use eigen::{cluster_sorted, hermitian_eig, quat_hermitian_eig, EigResult};
pub use json::{matrix_to_json, parse_matrix, Entry, MatrixJson};
pub use linalg::{null_space, null_space_scaled, projection_residual, rank, right_svd, RightSvd};
pub use matrix::{
    derealify, inner, normalized, realify, realify_operator, vec_add, vec_mul_right, vec_norm, vec_sub, Matrix,
};
pub use quaternion::Quaternion;
