//! Hermitian eigendecompositions.
//!
//! Complex Hermitian matrices are diagonalised with cyclic complex Jacobi
//! rotations. Quaternionic Hermitian matrices go through their complex
//! counterpart, whose spectrum is the quaternionic one with every
//! eigenvalue doubled; one quaternionic eigenvector per pair is rebuilt
//! from the complex ones.

use num_complex::Complex;
use num_traits::{Float, Zero};

use super::counterpart::{complex_counterpart, qrank, vector_from_counterpart};
use super::matrix::{inner, vec_mul_right, vec_norm, vec_sub};
use super::{rank, Matrix, Quaternion};
use crate::scalar::{HilbertScalar, Real, Scalar};
use crate::{Error, Result};

/// Real ascending eigenvalues with orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigResult<S: Scalar> {
    pub eigenvalues: Vec<S::Real>,
    /// Column `j` belongs to `eigenvalues[j]`; `A v = v lambda`.
    pub eigenvectors: Matrix<S>,
    /// `max_j |A v_j - v_j lambda_j|`.
    pub residual: S::Real,
}

impl<S: Scalar> EigResult<S> {
    /// `max |V^dagger V - I|`.
    pub fn orthonormality_defect(&self) -> S::Real {
        let v = &self.eigenvectors;
        (&v.adjoint() * v).max_abs_diff(&Matrix::identity(v.cols()))
    }

    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> Matrix<S> {
        let v = &self.eigenvectors;
        let d = Matrix::<S>::from_real_diagonal(&self.eigenvalues);
        &(v * &d) * &v.adjoint()
    }
}

fn eig_residual<S: Scalar>(a: &Matrix<S>, vals: &[S::Real], vecs: &Matrix<S>) -> S::Real {
    let av = a * vecs;
    (0..vals.len()).fold(S::Real::zero(), |acc, j| {
        let r: Vec<S> = (0..a.rows()).map(|i| av[(i, j)] - vecs[(i, j)].scale(vals[j])).collect();
        acc.max(vec_norm(&r))
    })
}

fn jacobi_tolerance<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(8.0))
}

/// Cyclic Jacobi for complex Hermitian matrices. Stops when the
/// off-diagonal Frobenius norm drops below `1e-12 * |A|_F` (or a few ulps for
/// `f32`).
pub fn hermitian_eig<T: Real>(a: &Matrix<Complex<T>>, herm_tol: T) -> Result<EigResult<Complex<T>>> {
    if !a.is_square() {
        return Err(Error::Dimension("eigendecomposition of a non-square matrix".into()));
    }
    let defect = a.hermitian_defect();
    if defect > herm_tol {
        return Err(Error::Validation(format!("matrix is not Hermitian (defect {defect:e})")));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::<Complex<T>>::identity(n);
    let norm = a.frobenius_norm();
    let stop = jacobi_tolerance::<T>() * norm;

    let off = |m: &Matrix<Complex<T>>| {
        let mut s = T::zero();
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    s += m[(p, q)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = n < 2;
    for _sweep in 0..100 {
        if off(&m) <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= T::min_positive_value() {
                    continue;
                }
                let e = apq / r;
                let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
                let tau = (aqq - app) / (r + r);
                let t = if tau.is_zero() {
                    T::one()
                } else {
                    tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let eb = e.conj();
                // columns: A <- A V
                for i in 0..n {
                    let (xp, xq) = (m[(i, p)], m[(i, q)]);
                    m[(i, p)] = xp * c - eb * xq * s;
                    m[(i, q)] = xp * s + eb * xq * c;
                    let (vp, vq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = vp * c - eb * vq * s;
                    v[(i, q)] = vp * s + eb * vq * c;
                }
                // rows: A <- V^dagger A
                for j in 0..n {
                    let (xp, xq) = (m[(p, j)], m[(q, j)]);
                    m[(p, j)] = xp * c - e * xq * s;
                    m[(q, j)] = xp * s + e * xq * c;
                }
                m[(p, q)] = Complex::new(T::zero(), T::zero());
                m[(q, p)] = Complex::new(T::zero(), T::zero());
            }
        }
    }
    if !converged && off(&m) > stop {
        return Err(Error::Numeric("Jacobi iteration did not converge".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.partial_cmp(&m[(y, y)].re).expect("finite eigenvalues"));
    let eigenvalues: Vec<T> = order.iter().map(|&k| m[(k, k)].re).collect();
    let eigenvectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    let residual = eig_residual(a, &eigenvalues, &eigenvectors);
    Ok(EigResult { eigenvalues, eigenvectors, residual })
}

/// Groups sorted values into runs whose consecutive gaps are at most
/// `rel_gap` times the spectral radius (or `rel_gap` itself for the zero
/// spectrum).
pub fn cluster_sorted<T: Real>(values: &[T], rel_gap: T) -> Vec<std::ops::Range<usize>> {
    let radius = values.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let scale = if radius.is_zero() { T::one() } else { radius };
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > rel_gap * scale {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// Pair-splitting threshold for the doubled counterpart spectrum. Genuine
/// quaternionic eigenvalues closer than this are merged into one cluster,
/// which is harmless: the cluster's eigenvectors still span an invariant
/// subspace.
const PAIR_GAP: f64 = 1e-9;

pub fn quat_hermitian_eig<T: Real>(
    g: &Matrix<Quaternion<T>>,
    herm_tol: T,
) -> Result<EigResult<Quaternion<T>>> {
    if !g.is_square() {
        return Err(Error::Dimension("eigendecomposition of a non-square matrix".into()));
    }
    let defect = g.hermitian_defect();
    if defect > herm_tol {
        return Err(Error::Validation(format!("matrix is not Hermitian (defect {defect:e})")));
    }
    let n = g.rows();
    let chi = complex_counterpart(g);
    let ce = hermitian_eig(&chi, herm_tol)?;

    let mut pairs: Vec<(T, Vec<Quaternion<T>>)> = Vec::with_capacity(n);
    for range in cluster_sorted(&ce.eigenvalues, T::lit(PAIR_GAP)) {
        if range.len() % 2 != 0 {
            return Err(Error::Numeric(format!(
                "counterpart eigenvalue cluster of odd size {} near {}",
                range.len(),
                ce.eigenvalues[range.start]
            )));
        }
        let d = range.len() / 2;
        let candidates: Vec<Vec<Quaternion<T>>> =
            range.clone().map(|j| vector_from_counterpart(&ce.eigenvectors.column(j))).collect();
        let mut accepted: Vec<Vec<Quaternion<T>>> = Vec::with_capacity(d);
        for _ in 0..d {
            // pivoted Gram-Schmidt under the right-quaternionic inner product
            let best = candidates
                .iter()
                .map(|c| {
                    let mut r = c.clone();
                    for u in &accepted {
                        r = vec_sub(&r, &vec_mul_right(u, inner(u, &r)));
                    }
                    r
                })
                .max_by(|a, b| vec_norm(a).partial_cmp(&vec_norm(b)).expect("finite norms"))
                .expect("nonempty cluster");
            let nb = vec_norm(&best);
            if nb <= T::lit(0.5) {
                return Err(Error::Numeric("failed to extract a quaternionic eigenvector".into()));
            }
            accepted.push(best.iter().map(|x| x.scale(T::one() / nb)).collect());
        }
        for u in accepted {
            let gu = g.mul_vec(&u)?;
            let lambda = inner(&u, &gu).w;
            pairs.push((lambda, u));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
    let eigenvalues: Vec<T> = pairs.iter().map(|p| p.0).collect();
    let cols: Vec<Vec<Quaternion<T>>> = pairs.into_iter().map(|p| p.1).collect();
    let eigenvectors = Matrix::from_columns(&cols)?;
    let residual = eig_residual(g, &eigenvalues, &eigenvectors);
    Ok(EigResult { eigenvalues, eigenvectors, residual })
}

impl<T: Real> HilbertScalar for Complex<T> {
    fn hermitian_eig(m: &Matrix<Self>, tol: T) -> Result<EigResult<Self>> {
        hermitian_eig(m, tol)
    }

    fn rank(m: &Matrix<Self>, rel_threshold: T) -> usize {
        rank(m, rel_threshold)
    }
}

impl<T: Real> HilbertScalar for Quaternion<T> {
    fn hermitian_eig(m: &Matrix<Self>, tol: T) -> Result<EigResult<Self>> {
        quat_hermitian_eig(m, tol)
    }

    fn rank(m: &Matrix<Self>, rel_threshold: T) -> usize {
        qrank(m, rel_threshold)
    }
}
