//! Deformed products on matrix algebras.
//!
//! For invertible `K` the product `A o_K B = A K B` is associative with
//! identity `K^-1`, and `phi(A) = K^-1 A` is an isomorphism from the
//! ordinary algebra onto the deformed one.

use num_traits::{Float, Zero};
use serde::{Deserialize, Serialize};

use crate::hermpair::{solution_space_scaled, MatrixSubspace};
use crate::qalg::{projection_residual, realify, Matrix};
use crate::random::{self, TrialRng};
use crate::scalar::{Real, Scalar};
use crate::{Error, Result};

/// Default ceiling for `|K|_F |K^-1|_F`.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct DeformedAlgebra<S: Scalar> {
    k: Matrix<S>,
    k_inv: Matrix<S>,
    condition: S::Real,
}

impl<S: Scalar> DeformedAlgebra<S> {
    pub fn new(k: Matrix<S>) -> Result<Self> {
        Self::with_condition_limit(k, S::Real::lit(MAX_CONDITION))
    }

    pub fn with_condition_limit(k: Matrix<S>, max_condition: S::Real) -> Result<Self> {
        if !k.is_square() {
            return Err(Error::Dimension("deforming matrix must be square".into()));
        }
        let k_inv = k.inverse()?;
        let condition = k.frobenius_norm() * k_inv.frobenius_norm();
        if !(condition <= max_condition) {
            return Err(Error::Validation(format!("deforming matrix too ill-conditioned ({condition:e})")));
        }
        Ok(DeformedAlgebra { k, k_inv, condition })
    }

    pub fn k(&self) -> &Matrix<S> {
        &self.k
    }

    pub fn condition(&self) -> S::Real {
        self.condition
    }

    pub fn dim(&self) -> usize {
        self.k.rows()
    }

    /// `A K B`.
    pub fn product(&self, a: &Matrix<S>, b: &Matrix<S>) -> Result<Matrix<S>> {
        a.matmul(&self.k)?.matmul(b)
    }

    /// `K^-1`.
    pub fn identity(&self) -> &Matrix<S> {
        &self.k_inv
    }

    /// `K^-1 A`.
    pub fn phi(&self, a: &Matrix<S>) -> Result<Matrix<S>> {
        self.k_inv.matmul(a)
    }

    /// `K A`.
    pub fn phi_inverse(&self, a: &Matrix<S>) -> Result<Matrix<S>> {
        self.k.matmul(a)
    }

    /// `A K B - B K A`.
    pub fn bracket(&self, a: &Matrix<S>, b: &Matrix<S>) -> Result<Matrix<S>> {
        self.product(a, b)?.try_sub(&self.product(b, a)?)
    }

    /// `max |E o A - A|, |A o E - A|` over the basis `E_ij * unit_k`.
    pub fn identity_defect(&self) -> S::Real {
        let n = self.dim();
        let e = &self.k_inv;
        let mut worst = S::Real::zero();
        for a in basis::<S>(n) {
            let l = &(e * &self.k) * &a;
            let r = &(&a * &self.k) * e;
            worst = worst.max(l.max_abs_diff(&a)).max(r.max_abs_diff(&a));
        }
        worst
    }
}

/// Real basis `E_ij * unit_k` of `n x n` matrices.
pub fn basis<S: Scalar>(n: usize) -> Vec<Matrix<S>> {
    let mut out = Vec::with_capacity(n * n * S::REAL_DIM);
    for i in 0..n {
        for j in 0..n {
            for k in 0..S::REAL_DIM {
                let mut e = Matrix::zeros(n, n);
                e[(i, j)] = S::unit(k);
                out.push(e);
            }
        }
    }
    out
}

/// Adjoints for the forms `h1 = H1` and `h2 = H1 G`.
#[derive(Debug, Clone)]
pub struct AdjointPair<S: Scalar> {
    h1: Matrix<S>,
    h1_inv: Matrix<S>,
    g: Matrix<S>,
    g_inv: Matrix<S>,
}

impl<S: Scalar> AdjointPair<S> {
    /// From the Gram matrices of the two forms.
    pub fn from_forms(h1: &Matrix<S>, h2: &Matrix<S>) -> Result<Self> {
        let h1_inv = h1.inverse()?;
        let g = h1_inv.matmul(h2)?;
        let g_inv = g.inverse()?;
        Ok(AdjointPair { h1: h1.clone(), h1_inv, g, g_inv })
    }

    /// `h1` the standard form, `h2(x, y) = x^dagger G y`.
    pub fn standard(g: &Matrix<S>) -> Result<Self> {
        Self::from_forms(&Matrix::identity(g.rows()), g)
    }

    pub fn g(&self) -> &Matrix<S> {
        &self.g
    }

    pub fn h2(&self) -> Matrix<S> {
        &self.h1 * &self.g
    }

    /// Adjoint for `h1`: `H1^-1 A^dagger H1`.
    pub fn dagger(&self, a: &Matrix<S>) -> Matrix<S> {
        &(&self.h1_inv * &a.adjoint()) * &self.h1
    }

    /// Adjoint for `h2`: `G^-1 dagger(A) G`.
    pub fn star(&self, a: &Matrix<S>) -> Matrix<S> {
        &(&self.g_inv * &self.dagger(a)) * &self.g
    }

    /// `max |h2(A e_i, e_j) - h2(e_i, star(A) e_j)|` over standard basis vectors.
    pub fn contract_defect(&self, a: &Matrix<S>) -> S::Real {
        // h2(Ax, y) = x^dagger A^dagger H2 y, h2(x, By) = x^dagger H2 B y
        let h2 = self.h2();
        let lhs = &a.adjoint() * &h2;
        let rhs = &h2 * &self.star(a);
        lhs.max_abs_diff(&rhs)
    }
}

/// `G^-1 A^dagger G` with `h1` standard.
pub fn second_adjoint<S: Scalar>(a: &Matrix<S>, g: &Matrix<S>) -> Result<Matrix<S>> {
    Ok(AdjointPair::standard(g)?.star(a))
}

/// `S = {A : [A, K] = 0}` or, deformed, `S_K = {A : [A, K]_K = A K K - K K A = 0}`.
pub fn subalgebra_s<S: Scalar>(k: &Matrix<S>, deformed: bool, null_tol: S::Real) -> Result<MatrixSubspace<S>> {
    if !k.is_square() {
        return Err(Error::Dimension("K must be square".into()));
    }
    let kk = if deformed { k * k } else { k.clone() };
    let scale = kk.frobenius_norm();
    solution_space_scaled(k.rows(), |a| Matrix::commutator(a, &kk), null_tol, scale)
}

/// Largest residual of projecting each basis element of one space onto the
/// other (realified, Frobenius).
pub fn span_distance<S: Scalar>(x: &MatrixSubspace<S>, y: &MatrixSubspace<S>) -> S::Real {
    let rx: Vec<Vec<S::Real>> = x.basis.iter().map(realify).collect();
    let ry: Vec<Vec<S::Real>> = y.basis.iter().map(realify).collect();
    let one_way = |from: &[Vec<S::Real>], onto: &[Vec<S::Real>]| {
        from.iter().fold(S::Real::zero(), |acc, v| acc.max(projection_residual(onto, v)))
    };
    one_way(&rx, &ry).max(one_way(&ry, &rx))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanComparison<T> {
    pub dim_s: usize,
    pub dim_s_k: usize,
    pub span_distance: T,
    pub equal: bool,
}

pub fn compare_s_and_s_k<S: Scalar>(k: &Matrix<S>, null_tol: S::Real, span_tol: S::Real) -> Result<SpanComparison<S::Real>> {
    let s = subalgebra_s(k, false, null_tol)?;
    let sk = subalgebra_s(k, true, null_tol)?;
    let d = span_distance(&s, &sk);
    Ok(SpanComparison { dim_s: s.real_dim, dim_s_k: sk.real_dim, equal: s.real_dim == sk.real_dim && d < span_tol, span_distance: d })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationCheck<T> {
    /// Every sampled defect is below the threshold.
    pub is_derivation: bool,
    /// Largest `|D| / (|H| |K| |A| |B|)` with
    /// `D = [H, A o B] - [H, A] o B - A o [H, B]`.
    pub max_defect: T,
    /// Largest `|D - A [H, K] B|` relative to the same scale.
    pub identity_residual: T,
    /// `|[H, K]| / (|H| |K|)`.
    pub commutator_norm: T,
}

/// Leibniz-rule test for `X -> [H, X]` over `o_K` on random pairs.
pub fn derivation_check<S: Scalar>(
    h: &Matrix<S>,
    k: &Matrix<S>,
    trials: usize,
    threshold: S::Real,
    rng: &mut TrialRng,
) -> Result<DerivationCheck<S::Real>> {
    if !h.is_square() || h.shape() != k.shape() {
        return Err(Error::Dimension("H and K must be square of equal size".into()));
    }
    let n = h.rows();
    let prod = |a: &Matrix<S>, b: &Matrix<S>| &(a * k) * b;
    let hk = Matrix::commutator(h, k)?;
    let hk_scale = h.frobenius_norm() * k.frobenius_norm();
    let tiny = S::Real::min_positive_value();
    let mut max_defect = S::Real::zero();
    let mut identity_residual = S::Real::zero();
    for _ in 0..trials {
        let a = random::matrix::<S>(rng, n, n);
        let b = random::matrix::<S>(rng, n, n);
        let lhs = Matrix::commutator(h, &prod(&a, &b))?;
        let t1 = prod(&Matrix::commutator(h, &a)?, &b);
        let t2 = prod(&a, &Matrix::commutator(h, &b)?);
        let d = &(&lhs - &t1) - &t2;
        let scale = (hk_scale * a.frobenius_norm() * b.frobenius_norm()).max(tiny);
        max_defect = max_defect.max(d.frobenius_norm() / scale);
        let oracle = &(&a * &hk) * &b;
        identity_residual = identity_residual.max(d.max_abs_diff(&oracle) / scale);
    }
    Ok(DerivationCheck {
        is_derivation: max_defect < threshold,
        max_defect,
        identity_residual,
        commutator_norm: hk.frobenius_norm() / hk_scale.max(tiny),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::Quaternion;
    use num_complex::Complex64;

    type C = Complex64;
    type Q = Quaternion<f64>;

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    fn cm(rows: Vec<Vec<f64>>) -> Matrix<C> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(c).collect()).collect()).unwrap()
    }

    #[test]
    fn product_basics() {
        let mut rng = random::rng_from_seed(1);
        let a = random::matrix::<C>(&mut rng, 3, 3);
        let b = random::matrix::<C>(&mut rng, 3, 3);
        let id = DeformedAlgebra::new(Matrix::identity(3)).unwrap();
        assert!(id.product(&a, &b).unwrap().max_abs_diff(&(&a * &b)) < 1e-15);
        let k = cm(vec![vec![1.0, 0.0], vec![0.0, 2.0]]);
        let alg = DeformedAlgebra::new(k.clone()).unwrap();
        let i2 = Matrix::identity(2);
        assert_eq!(alg.product(&i2, &i2).unwrap(), k);
        assert!(alg.identity().max_abs_diff(&cm(vec![vec![1.0, 0.0], vec![0.0, 0.5]])) < 1e-15);
        assert!(alg.identity_defect() < 1e-15);
    }

    #[test]
    fn phi_maps_units() {
        let mut rng = random::rng_from_seed(2);
        let k = random::near_identity::<Q>(&mut rng, 3, 0.5);
        let alg = DeformedAlgebra::new(k.clone()).unwrap();
        let i3 = Matrix::<Q>::identity(3);
        assert!(alg.phi(&i3).unwrap().max_abs_diff(alg.identity()) < 1e-15);
        assert!(alg.phi(&k).unwrap().max_abs_diff(&i3) < 1e-12);
        let a = random::matrix::<Q>(&mut rng, 3, 3);
        let b = random::matrix::<Q>(&mut rng, 3, 3);
        let lhs = alg.phi(&(&a * &b)).unwrap();
        let rhs = alg.product(&alg.phi(&a).unwrap(), &alg.phi(&b).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        assert!(alg.phi_inverse(&alg.phi(&a).unwrap()).unwrap().max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn singular_and_ill_conditioned_rejected() {
        assert!(DeformedAlgebra::new(cm(vec![vec![1.0, 1.0], vec![1.0, 1.0]])).is_err());
        let k = cm(vec![vec![1.0, 0.0], vec![0.0, 1e-9]]);
        assert!(matches!(DeformedAlgebra::new(k), Err(Error::Validation(_))));
    }

    #[test]
    fn second_adjoint_example() {
        let g = cm(vec![vec![1.0, 0.0], vec![0.0, 2.0]]);
        let a = cm(vec![vec![0.0, 1.0], vec![0.0, 0.0]]);
        let s = second_adjoint(&a, &g).unwrap();
        assert!(s.max_abs_diff(&cm(vec![vec![0.0, 0.0], vec![0.5, 0.0]])) < 1e-15);
        let pair = AdjointPair::standard(&g).unwrap();
        assert!(pair.contract_defect(&a) < 1e-15);
        assert!(pair.star(&g).max_abs_diff(&g) < 1e-15);
        assert!(pair.dagger(&g).max_abs_diff(&g) < 1e-15);
    }

    #[test]
    fn s_and_s_k() {
        let k = cm(vec![vec![1.0, 0.0], vec![0.0, 2.0]]);
        let cmp = compare_s_and_s_k(&k, 1e-9, 1e-10).unwrap();
        assert_eq!((cmp.dim_s, cmp.dim_s_k), (4, 4));
        assert!(cmp.equal);
        let full = subalgebra_s(&Matrix::<C>::identity(2), false, 1e-9).unwrap();
        assert_eq!(full.real_dim, 8);
    }

    #[test]
    fn s_k_is_larger_for_opposite_eigenvalues() {
        // K^2 = I, so every A lies in S_K while S is the diagonal algebra.
        let k = cm(vec![vec![1.0, 0.0], vec![0.0, -1.0]]);
        let cmp = compare_s_and_s_k(&k, 1e-9, 1e-10).unwrap();
        assert_eq!((cmp.dim_s, cmp.dim_s_k), (4, 8));
        assert!(!cmp.equal);
    }

    #[test]
    fn derivations() {
        let mut rng = random::rng_from_seed(3);
        let h = cm(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let k = cm(vec![vec![1.0, 0.0], vec![0.0, 2.0]]);
        let r = derivation_check(&h, &k, 10, 1e-10, &mut rng).unwrap();
        assert!(!r.is_derivation && r.max_defect > 1e-3);
        assert!(r.identity_residual < 1e-14);

        let hd = cm(vec![vec![3.0, 0.0], vec![0.0, -1.0]]);
        assert!(derivation_check(&hd, &k, 10, 1e-10, &mut rng).unwrap().is_derivation);
        let hq = random::matrix::<Q>(&mut rng, 3, 3);
        assert!(derivation_check(&hq, &Matrix::identity(3), 10, 1e-10, &mut rng).unwrap().is_derivation);
    }

    #[test]
    fn bracket_is_antisymmetric() {
        let mut rng = random::rng_from_seed(4);
        let alg = DeformedAlgebra::new(random::near_identity::<C>(&mut rng, 3, 0.5)).unwrap();
        let a = random::matrix::<C>(&mut rng, 3, 3);
        assert!(alg.bracket(&a, &a).unwrap().max_abs() < 1e-15);
    }
}
