//! Pairs of Hermitian structures on `C^n` or `H^n`.
//!
//! Two positive Hermitian forms `h1(x, y) = x^dagger H1 y` and
//! `h2(x, y) = x^dagger H2 y` are related by the connecting operator
//! `G = H1^-1 H2`, i.e. `h2(x, y) = h1(G x, y)`. Its spectral data decide
//! the bi-unitary group and whether the pair is in generic position.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::qalg::{
    cluster_sorted, derealify, null_space_scaled, realify_operator, vec_norm, EigResult, Matrix,
};
use crate::scalar::{FieldKind, HilbertScalar, Real, Scalar};
use crate::{Error, Result};

/// Numerical tie rules. All are relative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances<T> {
    /// Hermiticity of inputs, relative to `max(1, max|entry|)`.
    pub hermitian: T,
    /// Eigenvalues closer than `cluster * spectral radius` are one eigenvalue.
    pub cluster: T,
    /// Pivot threshold for ranks.
    pub rank: T,
    /// Singular values below `null * sigma_max` span null spaces.
    pub null: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Tolerances { hermitian: T::lit(1e-10), cluster: T::lit(1e-8), rank: T::lit(1e-10), null: T::lit(1e-9) }
    }
}

/// Gram matrix of a positive-definite Hermitian form.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm<S: Scalar> {
    gram: Matrix<S>,
}

impl<S: HilbertScalar> HermitianForm<S> {
    pub fn new(gram: Matrix<S>, tol: S::Real) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::Dimension("Gram matrix must be square".into()));
        }
        if gram.hermitian_defect() > tol {
            return Err(Error::Validation("Gram matrix is not Hermitian".into()));
        }
        gram.cholesky().map_err(|_| Error::Validation("form is not positive definite".into()))?;
        Ok(HermitianForm { gram })
    }

    pub fn identity(n: usize) -> Self {
        HermitianForm { gram: Matrix::identity(n) }
    }

    pub fn gram(&self) -> &Matrix<S> {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn field(&self) -> FieldKind {
        S::FIELD
    }

    /// `x^dagger H y`.
    pub fn eval(&self, x: &[S], y: &[S]) -> Result<S> {
        let hy = self.gram.mul_vec(y)?;
        Ok(crate::qalg::inner(x, &hy))
    }
}

/// `G = H1^-1 H2` with its spectral decomposition.
#[derive(Debug, Clone)]
pub struct ConnectingOperator<S: Scalar> {
    pub g: Matrix<S>,
    /// Ascending, with repetition.
    pub spectrum: Vec<S::Real>,
    /// Eigenvalue clusters in ascending order.
    pub degeneracies: Vec<usize>,
    /// One representative value per cluster.
    pub distinct_values: Vec<S::Real>,
    /// Columns `v` with `G v = v lambda`, orthonormal for `h1`.
    pub eigenvectors: Matrix<S>,
    /// `max |H2 - G^dagger H1|`, i.e. the defect of `h2(x,y) = h1(Gx,y)`.
    pub relation_defect: S::Real,
    /// Hermiticity defects of `H1 G` and `H2 G`.
    pub self_adjoint_defect: (S::Real, S::Real),
}

pub fn connecting_operator<S: HilbertScalar>(
    h1: &HermitianForm<S>,
    h2: &HermitianForm<S>,
    tol: &Tolerances<S::Real>,
) -> Result<ConnectingOperator<S>> {
    if h1.dim() != h2.dim() {
        return Err(Error::Dimension(format!("forms of dimension {} and {}", h1.dim(), h2.dim())));
    }
    let (a, b) = (h1.gram(), h2.gram());
    let g = a.inverse()?.matmul(b)?;

    // whitened problem: L^-1 H2 L^-dagger is Hermitian with the spectrum of G
    let l = a.cholesky()?;
    let l_inv = l.inverse()?;
    let whitened = &(&l_inv * b) * &l_inv.adjoint();
    let whitened = (&whitened + &whitened.adjoint()).scale(S::Real::lit(0.5));
    let eig: EigResult<S> = S::hermitian_eig(&whitened, tol.hermitian)?;
    if eig.eigenvalues.iter().any(|&v| v <= S::Real::zero()) {
        return Err(Error::Validation("connecting operator is not positive".into()));
    }
    let eigenvectors = &l_inv.adjoint() * &eig.eigenvectors;

    let clusters = cluster_sorted(&eig.eigenvalues, tol.cluster);
    let degeneracies = clusters.iter().map(|r| r.len()).collect();
    let distinct_values = clusters
        .iter()
        .map(|r| {
            let s = eig.eigenvalues[r.clone()].iter().fold(S::Real::zero(), |acc, &v| acc + v);
            s / S::Real::from_usize_lossy(r.len())
        })
        .collect();

    let relation_defect = b.max_abs_diff(&(&g.adjoint() * a));
    let self_adjoint_defect = ((a * &g).hermitian_defect(), (b * &g).hermitian_defect());
    Ok(ConnectingOperator {
        g,
        spectrum: eig.eigenvalues,
        degeneracies,
        distinct_values,
        eigenvectors,
        relation_defect,
        self_adjoint_defect,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub degeneracies: Vec<usize>,
    pub label: String,
}

pub fn group_label(degeneracies: &[usize], field: FieldKind) -> String {
    let suffix = if field == FieldKind::Quaternionic { ",Q" } else { "" };
    degeneracies.iter().map(|d| format!("U({d}{suffix})")).collect::<Vec<_>>().join("x")
}

pub fn biunitary_signature<S: Scalar>(op: &ConnectingOperator<S>) -> Signature {
    Signature { degeneracies: op.degeneracies.clone(), label: group_label(&op.degeneracies, S::FIELD) }
}

/// Krylov matrix `[x0, G x0, ..., G^{n-1} x0]` with every column scaled to
/// unit length, which leaves the rank unchanged.
pub fn krylov_matrix<S: Scalar>(g: &Matrix<S>, x0: &[S]) -> Result<Matrix<S>> {
    let n = g.rows();
    let mut cols = Vec::with_capacity(n);
    let mut v = x0.to_vec();
    for _ in 0..n {
        let nv = vec_norm(&v);
        if nv.is_zero() {
            cols.push(v.clone());
        } else {
            v = v.iter().map(|x| x.scale(S::Real::one() / nv)).collect();
            cols.push(v.clone());
        }
        v = g.mul_vec(&v)?;
    }
    Matrix::from_columns(&cols)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cyclicity<S> {
    pub cyclic: bool,
    /// The start vector that was tested; absent if none could be built.
    pub witness: Option<Vec<S>>,
}

/// Krylov rank test. Without `x0` the witness comes from [`cyclic_vector`],
/// which requires `G` to be Hermitian.
pub fn is_cyclic<S: HilbertScalar>(
    g: &Matrix<S>,
    x0: Option<&[S]>,
    tol: &Tolerances<S::Real>,
) -> Result<Cyclicity<S>> {
    if !g.is_square() {
        return Err(Error::Dimension("cyclicity of a non-square matrix".into()));
    }
    let x = match x0 {
        Some(x) => x.to_vec(),
        None => match cyclic_vector(g, tol) {
            Ok(x) => x,
            Err(Error::NoCyclicVector) => return Ok(Cyclicity { cyclic: false, witness: None }),
            Err(e) => return Err(e),
        },
    };
    krylov_test(g, x, tol)
}

fn krylov_test<S: HilbertScalar>(g: &Matrix<S>, x: Vec<S>, tol: &Tolerances<S::Real>) -> Result<Cyclicity<S>> {
    if x.len() != g.rows() {
        return Err(Error::Dimension("start vector length differs from matrix size".into()));
    }
    let k = krylov_matrix(g, &x)?;
    let cyclic = S::rank(&k, tol.rank) == g.rows();
    Ok(Cyclicity { cyclic, witness: Some(x) })
}

fn sum_of_columns<S: Scalar>(v: &Matrix<S>) -> Vec<S> {
    (0..v.rows()).map(|i| (0..v.cols()).fold(S::zero(), |acc, j| acc + v[(i, j)])).collect()
}

/// Sum of the eigenvectors of a Hermitian `G` with unit weights.
pub fn cyclic_vector<S: HilbertScalar>(g: &Matrix<S>, tol: &Tolerances<S::Real>) -> Result<Vec<S>> {
    let eig = S::hermitian_eig(g, tol.hermitian)?;
    if cluster_sorted(&eig.eigenvalues, tol.cluster).iter().any(|r| r.len() > 1) {
        return Err(Error::NoCyclicVector);
    }
    Ok(sum_of_columns(&eig.eigenvectors))
}

impl<S: HilbertScalar> ConnectingOperator<S> {
    pub fn is_generic(&self) -> bool {
        self.degeneracies.iter().all(|&d| d == 1)
    }

    /// Same construction as [`cyclic_vector`] but with the stored
    /// eigenvectors, so it works for `G` that is only `h1`-self-adjoint.
    pub fn cyclic_vector(&self) -> Result<Vec<S>> {
        if !self.is_generic() {
            return Err(Error::NoCyclicVector);
        }
        Ok(sum_of_columns(&self.eigenvectors))
    }

    pub fn cyclicity(&self, tol: &Tolerances<S::Real>) -> Result<Cyclicity<S>> {
        match self.cyclic_vector() {
            Ok(x) => krylov_test(&self.g, x, tol),
            Err(Error::NoCyclicVector) => Ok(Cyclicity { cyclic: false, witness: None }),
            Err(e) => Err(e),
        }
    }
}

/// Real-linear subspace of square matrices given by an orthonormal (after
/// realification) basis.
#[derive(Debug, Clone)]
pub struct MatrixSubspace<S: Scalar> {
    pub real_dim: usize,
    pub basis: Vec<Matrix<S>>,
}

/// Null space of a real-linear map on `n x n` matrices.
pub fn solution_space<S: Scalar>(
    n: usize,
    f: impl Fn(&Matrix<S>) -> Result<Matrix<S>>,
    null_tol: S::Real,
) -> Result<MatrixSubspace<S>> {
    solution_space_scaled(n, f, null_tol, S::Real::zero())
}

/// [`solution_space`] with singular values compared against
/// `null_tol * max(sigma_max, scale)`; `scale` is the expected size of the
/// map (e.g. `|G|` for `X -> [G, X]`).
pub fn solution_space_scaled<S: Scalar>(
    n: usize,
    f: impl Fn(&Matrix<S>) -> Result<Matrix<S>>,
    null_tol: S::Real,
    scale: S::Real,
) -> Result<MatrixSubspace<S>> {
    let op = realify_operator(n, n, f)?;
    let basis: Vec<Matrix<S>> = null_space_scaled(&op, null_tol, scale).iter().map(|v| derealify(n, n, v)).collect();
    Ok(MatrixSubspace { real_dim: basis.len(), basis })
}

/// `{X : G X = X G}`.
pub fn commutant<S: Scalar>(g: &Matrix<S>, null_tol: S::Real) -> Result<MatrixSubspace<S>> {
    if !g.is_square() {
        return Err(Error::Dimension("commutant of a non-square matrix".into()));
    }
    solution_space_scaled(g.rows(), |x| Matrix::commutator(g, x), null_tol, g.frobenius_norm())
}

/// `{Y : Y X = X Y for every X in the span}`.
pub fn centralizer<S: Scalar>(
    n: usize,
    generators: &[Matrix<S>],
    null_tol: S::Real,
) -> Result<MatrixSubspace<S>> {
    if generators.is_empty() {
        return solution_space(n, |_| Ok(Matrix::zeros(1, 1)), null_tol);
    }
    let scale = generators.iter().fold(S::Real::zero(), |acc, x| num_traits::Float::max(acc, x.frobenius_norm()));
    solution_space_scaled(
        n,
        |y| {
            let m = generators.len();
            let brackets = generators.iter().map(|x| Matrix::commutator(y, x)).collect::<Result<Vec<_>>>()?;
            Ok(Matrix::from_fn(m * n, n, |r, c| brackets[r / n][(r % n, c)]))
        },
        null_tol,
        scale,
    )
}

pub fn commutant_dimension<S: Scalar>(g: &Matrix<S>, null_tol: S::Real) -> Result<(usize, Vec<Matrix<S>>)> {
    let c = commutant(g, null_tol)?;
    Ok((c.real_dim, c.basis))
}

pub fn bicommutant_dimension<S: Scalar>(g: &Matrix<S>, null_tol: S::Real) -> Result<usize> {
    let c = commutant(g, null_tol)?;
    Ok(centralizer(g.rows(), &c.basis, null_tol)?.real_dim)
}

/// Dimension of the commutant predicted from the degeneracies:
/// `REAL_DIM * sum d_k^2`.
pub fn predicted_commutant_dim(degeneracies: &[usize], field: FieldKind) -> usize {
    field.real_dim() * degeneracies.iter().map(|d| d * d).sum::<usize>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport<T> {
    pub field: FieldKind,
    pub dimension: usize,
    pub spectrum: Vec<T>,
    pub distinct_spectrum: bool,
    pub cyclic: bool,
    /// Real components of each entry of the tested start vector.
    pub cyclic_witness: Option<Vec<Vec<T>>>,
    pub commutant_real_dim: usize,
    pub predicted_commutant_real_dim: usize,
    pub bicommutant_real_dim: usize,
    pub def3_holds: bool,
    pub signature: Vec<usize>,
    pub group_label: String,
    /// A positive connecting operator exists and the bi-unitary group is nontrivial.
    pub compatible: bool,
    /// Signature made of ones only.
    pub minimal: bool,
    pub relation_defect: T,
    pub self_adjoint_defect: [T; 2],
    /// The field-dependent relations between the predicates hold.
    pub consistent: bool,
    pub tolerances: Tolerances<T>,
}

pub fn genericity_report<S: HilbertScalar>(
    h1: &HermitianForm<S>,
    h2: &HermitianForm<S>,
    tol: &Tolerances<S::Real>,
) -> Result<GenericityReport<S::Real>> {
    let op = connecting_operator(h1, h2, tol)?;
    let n = h1.dim();
    let cyc = op.cyclicity(tol)?;
    let comm = commutant(&op.g, tol.null)?;
    let bicomm = centralizer(n, &comm.basis, tol.null)?;
    let sig = biunitary_signature(&op);
    let distinct = op.is_generic();
    let def3 = comm.real_dim == bicomm.real_dim;
    let consistent = match S::FIELD {
        FieldKind::Quaternionic => distinct == cyc.cyclic && (!distinct || !def3),
        _ => distinct == cyc.cyclic && cyc.cyclic == def3,
    };
    Ok(GenericityReport {
        field: S::FIELD,
        dimension: n,
        spectrum: op.spectrum.clone(),
        distinct_spectrum: distinct,
        cyclic: cyc.cyclic,
        cyclic_witness: cyc.witness.map(|w| w.iter().map(|x| x.components()).collect()),
        commutant_real_dim: comm.real_dim,
        predicted_commutant_real_dim: predicted_commutant_dim(&op.degeneracies, S::FIELD),
        bicommutant_real_dim: bicomm.real_dim,
        def3_holds: def3,
        minimal: distinct,
        compatible: !sig.degeneracies.is_empty(),
        signature: sig.degeneracies,
        group_label: sig.label,
        relation_defect: op.relation_defect,
        self_adjoint_defect: [op.self_adjoint_defect.0, op.self_adjoint_defect.1],
        consistent,
        tolerances: *tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::Quaternion;
    use num_complex::Complex64;

    type Q = Quaternion<f64>;
    type C = Complex64;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn cdiag(d: &[f64]) -> HermitianForm<C> {
        HermitianForm::new(Matrix::from_real_diagonal(d), 1e-12).unwrap()
    }

    fn qpair() -> (HermitianForm<Q>, HermitianForm<Q>) {
        let g = Matrix::from_rows(vec![vec![Q::from_real(2.0), Q::j()], vec![-Q::j(), Q::from_real(2.0)]]).unwrap();
        (HermitianForm::identity(2), HermitianForm::new(g, 1e-12).unwrap())
    }

    #[test]
    fn identity_pair() {
        let op = connecting_operator(&cdiag(&[1.0, 1.0]), &cdiag(&[1.0, 1.0]), &tol()).unwrap();
        assert!(op.g.max_abs_diff(&Matrix::identity(2)) < 1e-15);
        assert_eq!(biunitary_signature(&op).label, "U(2)");
    }

    #[test]
    fn diagonal_pair() {
        let op = connecting_operator(&cdiag(&[1.0, 1.0]), &cdiag(&[1.0, 2.0]), &tol()).unwrap();
        assert!(op.g.max_abs_diff(&Matrix::from_real_diagonal(&[1.0, 2.0])) < 1e-15);
        assert_eq!(op.degeneracies, vec![1, 1]);
        assert!((op.spectrum[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn quaternionic_pair_spectrum() {
        let (h1, h2) = qpair();
        let op = connecting_operator(&h1, &h2, &tol()).unwrap();
        assert!(op.g.max_abs_diff(h2.gram()) < 1e-15);
        assert!((op.spectrum[0] - 1.0).abs() < 1e-13 && (op.spectrum[1] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn non_positive_rejected() {
        assert!(HermitianForm::<C>::new(Matrix::from_real_diagonal(&[1.0, -1.0]), 1e-12).is_err());
        let bad = Matrix::from_rows(vec![vec![C::new(1.0, 0.0), C::new(0.0, 1.0)], vec![C::new(0.0, 1.0), C::new(1.0, 0.0)]]).unwrap();
        assert!(matches!(HermitianForm::new(bad, 1e-12), Err(Error::Validation(_))));
        assert!(connecting_operator(&cdiag(&[1.0]), &cdiag(&[1.0, 1.0]), &tol()).is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(group_label(&[2, 1], FieldKind::Complex), "U(2)xU(1)");
        assert_eq!(group_label(&[1, 1, 1], FieldKind::Complex), "U(1)xU(1)xU(1)");
        assert_eq!(group_label(&[3], FieldKind::Quaternionic), "U(3,Q)");
    }

    #[test]
    fn cyclicity_examples() {
        let one = C::new(1.0, 0.0);
        let g = Matrix::<C>::from_real_diagonal(&[1.0, 2.0]);
        assert!(is_cyclic(&g, Some(&[one, one]), &tol()).unwrap().cyclic);
        let i2 = Matrix::<C>::identity(2);
        assert!(!is_cyclic(&i2, Some(&[one, C::new(0.3, -2.0)]), &tol()).unwrap().cyclic);
        assert!(matches!(cyclic_vector(&i2, &tol()), Err(Error::NoCyclicVector)));
        let w = cyclic_vector(&g, &tol()).unwrap();
        assert!(w.iter().all(|x| (x.norm() - 1.0).abs() < 1e-14));

        let gq = Matrix::<Q>::from_real_diagonal(&[1.0, 2.0]);
        assert!(is_cyclic(&gq, Some(&[Q::one(), Q::j()]), &tol()).unwrap().cyclic);
    }

    #[test]
    fn commutant_examples() {
        let t = 1e-9;
        let g = Matrix::<C>::from_real_diagonal(&[1.0, 2.0]);
        assert_eq!(commutant_dimension(&g, t).unwrap().0, 4);
        assert_eq!(bicommutant_dimension(&g, t).unwrap(), 4);
        let i2 = Matrix::<C>::identity(2);
        assert_eq!(commutant_dimension(&i2, t).unwrap().0, 8);
        assert_eq!(bicommutant_dimension(&i2, t).unwrap(), 2);
        let gq = Matrix::<Q>::from_real_diagonal(&[1.0, 2.0]);
        assert_eq!(commutant_dimension(&gq, t).unwrap().0, 8);
        assert_eq!(bicommutant_dimension(&gq, t).unwrap(), 2);
    }

    #[test]
    fn reports() {
        let r = genericity_report(&cdiag(&[1.0, 1.0, 1.0]), &cdiag(&[1.0, 2.0, 3.0]), &tol()).unwrap();
        assert!(r.distinct_spectrum && r.cyclic && r.def3_holds && r.consistent);
        assert_eq!(r.signature, vec![1, 1, 1]);

        let r = genericity_report(&cdiag(&[1.0, 1.0, 1.0]), &cdiag(&[2.0, 2.0, 5.0]), &tol()).unwrap();
        assert!(!r.distinct_spectrum && !r.cyclic && !r.def3_holds && r.consistent);
        assert_eq!(r.signature, vec![2, 1]);
        assert_eq!(r.commutant_real_dim, 10);

        let (h1, h2) = qpair();
        let r = genericity_report(&h1, &h2, &tol()).unwrap();
        assert!(r.distinct_spectrum && r.cyclic && !r.def3_holds && r.consistent);
        assert_eq!((r.commutant_real_dim, r.bicommutant_real_dim), (8, 2));
        assert_eq!(r.group_label, "U(1,Q)xU(1,Q)");
    }
}
