//! Complex counterpart of quaternionic matrices.
//!
//! Writing a quaternionic matrix as `M = A + B j` with complex `A`, `B`
//! (entrywise symplectic split), the counterpart is the `2n x 2m` complex
//! matrix
//!
//! ```text
//! chi(M) = [  A        B     ]
//!          [ -conj(B)  conj(A) ]
//! ```
//!
//! which is an injective ring homomorphism with `chi(M^dagger) = chi(M)^dagger`.
//! Column vectors `x = x1 + x2 j` map to `(x1; -conj(x2))`, so that
//! `chi(M) phi(x) = phi(M x)` and `phi(x c) = phi(x) c` for complex `c`.

use num_complex::Complex;

use super::{Matrix, Quaternion};
use crate::scalar::{Real, Scalar};
use crate::{Error, Result};

pub fn complex_counterpart<T: Real>(m: &Matrix<Quaternion<T>>) -> Matrix<Complex<T>> {
    let (r, c) = m.shape();
    Matrix::from_fn(2 * r, 2 * c, |i, j| {
        let (bi, ii) = (i / r, i % r);
        let (bj, jj) = (j / c, j % c);
        let (a, b) = m[(ii, jj)].split();
        match (bi, bj) {
            (0, 0) => a,
            (0, 1) => b,
            (1, 0) => -b.conj(),
            _ => a.conj(),
        }
    })
}

/// Inverse of [`complex_counterpart`] on its image. The input must have the
/// block structure; only the top block row is read, the bottom one is
/// checked against it.
pub fn from_complex_counterpart<T: Real>(c: &Matrix<Complex<T>>, tol: T) -> Result<Matrix<Quaternion<T>>> {
    let (r2, c2) = c.shape();
    if r2 % 2 != 0 || c2 % 2 != 0 {
        return Err(Error::Dimension("counterpart must have even shape".into()));
    }
    let (r, cc) = (r2 / 2, c2 / 2);
    let mut defect = T::zero();
    let q = Matrix::from_fn(r, cc, |i, j| {
        let a = c[(i, j)];
        let b = c[(i, j + cc)];
        defect = defect
            .max((c[(i + r, j)] + b.conj()).norm())
            .max((c[(i + r, j + cc)] - a.conj()).norm());
        Quaternion::from_split(a, b)
    });
    if defect > tol {
        return Err(Error::Validation(format!("not a complex counterpart (block defect {defect:e})")));
    }
    Ok(q)
}

/// `x = x1 + x2 j  ->  (x1; -conj(x2))`.
pub fn vector_to_counterpart<T: Real>(x: &[Quaternion<T>]) -> Vec<Complex<T>> {
    let (top, bottom): (Vec<_>, Vec<_>) = x
        .iter()
        .map(|q| {
            let (a, b) = q.split();
            (a, -b.conj())
        })
        .unzip();
    top.into_iter().chain(bottom).collect()
}

/// Inverse of [`vector_to_counterpart`]; total on `C^{2n}`.
pub fn vector_from_counterpart<T: Real>(v: &[Complex<T>]) -> Vec<Quaternion<T>> {
    let n = v.len() / 2;
    (0..n).map(|i| Quaternion::from_split(v[i], -v[i + n].conj())).collect()
}

/// Embeds a complex matrix entrywise into the quaternions.
pub fn complex_to_quaternionic<T: Real>(m: &Matrix<Complex<T>>) -> Matrix<Quaternion<T>> {
    m.map(Quaternion::from_complex)
}

/// Rank over the quaternions: `rank(chi(M)) / 2`.
pub fn qrank<T: Real>(m: &Matrix<Quaternion<T>>, rel_threshold: T) -> usize {
    super::rank(&complex_counterpart(m), rel_threshold) / 2
}

/// Determinant of the counterpart of the weighted Krylov matrix
/// `K[l][m] = mu_l * lambda_l^m` alongside the closed form
/// `prod |mu_l|^2 * V(lambda)^2`, `V` the Vandermonde determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VandermondeCheck<T> {
    pub closed_form: T,
    pub brute_force: T,
}

impl<T: Real> VandermondeCheck<T> {
    pub fn relative_defect(&self) -> T {
        let scale = self.closed_form.abs().max(self.brute_force.abs()).max(T::min_positive_value());
        if self.closed_form == self.brute_force {
            T::zero()
        } else {
            (self.closed_form - self.brute_force).abs() / scale
        }
    }
}

pub fn vandermonde_counterpart_det<T: Real>(
    lambdas: &[T],
    mus: &[Quaternion<T>],
) -> Result<VandermondeCheck<T>> {
    let n = lambdas.len();
    if mus.len() != n {
        return Err(Error::Dimension(format!("{} eigenvalues but {} weights", n, mus.len())));
    }
    let weight: T = mus.iter().fold(T::one(), |acc, m| acc * m.norm_sqr());
    let mut v = T::one();
    for a in 0..n {
        for b in a + 1..n {
            v *= lambdas[b] - lambdas[a];
        }
    }
    let closed_form = weight * v * v;

    let krylov = Matrix::from_fn(n, n, |l, m| mus[l].scale(lambdas[l].powi(m as i32)));
    let det = complex_counterpart(&krylov).determinant();
    Ok(VandermondeCheck { closed_form, brute_force: det.re })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use num_complex::Complex64;

    type Q = Quaternion<f64>;

    fn q1(q: Q) -> Matrix<Q> {
        Matrix::from_vec(1, 1, vec![q]).unwrap()
    }

    #[test]
    fn counterpart_of_j() {
        let c = complex_counterpart(&q1(Q::j()));
        let expect = Matrix::from_rows(vec![
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(c, expect);
    }

    #[test]
    fn counterpart_of_identity() {
        let c = complex_counterpart(&Matrix::<Q>::identity(2));
        assert_eq!(c, Matrix::identity(4));
    }

    #[test]
    fn counterpart_i_times_j_is_k() {
        let lhs = &complex_counterpart(&q1(Q::i())) * &complex_counterpart(&q1(Q::j()));
        assert!(lhs.max_abs_diff(&complex_counterpart(&q1(Q::k()))) < 1e-15);
    }

    #[test]
    fn counterpart_inverts() {
        let m = Matrix::from_rows(vec![vec![Q::new(1.0, 2.0, 3.0, 4.0), Q::k()], vec![Q::j(), Q::i()]]).unwrap();
        let back = from_complex_counterpart(&complex_counterpart(&m), 1e-14).unwrap();
        assert_eq!(back, m);
        let mut broken = complex_counterpart(&m);
        broken[(3, 3)] = Complex64::new(9.0, 0.0);
        assert!(from_complex_counterpart(&broken, 1e-12).is_err());
    }

    #[test]
    fn vector_map_intertwines() {
        let m = Matrix::from_rows(vec![vec![Q::new(1.0, 2.0, 3.0, 4.0), Q::k()], vec![Q::j(), Q::i()]]).unwrap();
        let x = vec![Q::new(0.5, -1.0, 2.0, 0.3), Q::new(-0.2, 0.0, 1.0, 1.0)];
        let lhs = complex_counterpart(&m).mul_vec(&vector_to_counterpart(&x)).unwrap();
        let rhs = vector_to_counterpart(&m.mul_vec(&x).unwrap());
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).norm() < 1e-14);
        }
        assert_eq!(vector_from_counterpart(&vector_to_counterpart(&x)), x);
    }

    #[test]
    fn qrank_basics() {
        assert_eq!(qrank(&Matrix::<Q>::identity(2), 1e-10), 2);
        assert_eq!(qrank(&Matrix::<Q>::zeros(2, 2), 1e-10), 0);
        // columns (1, j) and (j, -1) = (1, j) j are right-dependent
        let m = Matrix::from_rows(vec![vec![Q::one(), Q::j()], vec![Q::j(), -Q::one()]]).unwrap();
        assert_eq!(qrank(&m, 1e-10), 1);
    }

    #[test]
    fn krylov_of_diag_with_weights_one_j_has_full_rank() {
        let g = Matrix::<Q>::from_real_diagonal(&[1.0, 2.0]);
        let x0 = vec![Q::one(), Q::j()];
        let gx = g.mul_vec(&x0).unwrap();
        let k = Matrix::from_columns(&[x0, gx]).unwrap();
        // brute-force 4x4 determinant of the counterpart is nonzero
        let det = complex_counterpart(&k).determinant();
        assert!((det.re - 1.0).abs() < 1e-14 && det.im.abs() < 1e-14);
        assert_eq!(qrank(&k, 1e-10), 2);
    }

    #[test]
    fn vandermonde_examples() {
        let one = vandermonde_counterpart_det(&[1.0, 2.0], &[Q::one(), Q::one()]).unwrap();
        assert!((one.closed_form - 1.0).abs() < 1e-15);
        assert!((one.brute_force - 1.0).abs() < 1e-12);

        let zero = vandermonde_counterpart_det(&[1.0, 1.0], &[Q::one(), Q::one()]).unwrap();
        assert_eq!(zero.closed_form, 0.0);
        assert!(zero.brute_force.abs() < 1e-12);

        let mus = [Q::one(), Q::j(), Q::new(1.0, 0.0, 0.0, 1.0)];
        let c = vandermonde_counterpart_det(&[0.0, 1.0, 3.0], &mus).unwrap();
        assert!((c.closed_form - 72.0).abs() < 1e-12);
        assert!((c.brute_force - 72.0).abs() < 1e-9);
        assert!(c.relative_defect() < 1e-8);
    }

    #[test]
    fn mismatched_lengths() {
        assert!(vandermonde_counterpart_det(&[1.0], &[Q::one(), Q::one()]).is_err());
    }
}
