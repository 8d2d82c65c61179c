//! Rank, determinants and real null spaces.

use num_complex::Complex;
use num_traits::Zero;

use super::Matrix;
use crate::scalar::{Real, Scalar};

/// Rank by Gaussian elimination with complete pivoting. A pivot counts when
/// its modulus exceeds `rel_threshold` times the largest pivot seen (the
/// first one). Row operations are left multiplications, so over the
/// quaternions this is the rank of the right span of the columns.
pub fn rank<S: Scalar>(m: &Matrix<S>, rel_threshold: S::Real) -> usize {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut col_perm: Vec<usize> = (0..cols).collect();
    let mut first_pivot = S::Real::zero();
    let mut r = 0;
    while r < rows.min(cols) {
        let mut best = (r, r, S::Real::zero());
        for i in r..rows {
            for j in r..cols {
                let v = a[(i, col_perm[j])].modulus();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if r == 0 {
            first_pivot = best.2;
        }
        if best.2.is_zero() || best.2 <= rel_threshold * first_pivot {
            break;
        }
        a.swap_rows(r, best.0);
        col_perm.swap(r, best.1);
        let pc = col_perm[r];
        let p_inv = a[(r, pc)].inv().expect("nonzero pivot");
        for i in r + 1..rows {
            let f = a[(i, pc)] * p_inv;
            if f.is_zero() {
                continue;
            }
            for j in r..cols {
                let cj = col_perm[j];
                a[(i, cj)] = a[(i, cj)] - f * a[(r, cj)];
            }
        }
        r += 1;
    }
    r
}

fn lu_determinant<S: Scalar>(m: &Matrix<S>) -> S {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut det = S::one();
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&x, &y| a[(x, c)].modulus().partial_cmp(&a[(y, c)].modulus()).expect("finite entries"))
            .unwrap_or(c);
        if a[(piv, c)].is_zero() {
            return S::zero();
        }
        if piv != c {
            a.swap_rows(piv, c);
            det = -det;
        }
        let p = a[(c, c)];
        det = det * p;
        let p_inv = p.inv().expect("nonzero pivot");
        for r in c + 1..n {
            let f = a[(r, c)] * p_inv;
            for j in c..n {
                a[(r, j)] = a[(r, j)] - f * a[(c, j)];
            }
        }
    }
    det
}

impl<T: Real> Matrix<Complex<T>> {
    /// LU determinant with partial pivoting. Panics if not square.
    pub fn determinant(&self) -> Complex<T> {
        lu_determinant(self)
    }
}

impl<T: Real> Matrix<T> {
    pub fn determinant(&self) -> T {
        lu_determinant(self)
    }
}

/// Thin SVD data from one-sided Jacobi: singular values (unsorted, one per
/// column) and the right singular vectors as columns of `v`.
#[derive(Debug, Clone)]
pub struct RightSvd<T> {
    pub singular_values: Vec<T>,
    pub v: Matrix<T>,
}

/// One-sided (Hestenes) Jacobi SVD. Orthogonalises the columns of `a` by
/// plane rotations accumulated into `V`; then `a V` has orthogonal columns
/// whose norms are the singular values.
pub fn right_svd<T: Real>(a: &Matrix<T>) -> RightSvd<T> {
    let (m, n) = a.shape();
    // column-major copy
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| a.column(j)).collect();
    let mut v = Matrix::<T>::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..m {
                    let (x, y) = (cols[p][i], cols[q][i]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma.is_zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (cols[p][i], cols[q][i]);
                    cols[p][i] = c * x - s * y;
                    cols[q][i] = s * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * x - s * y;
                    v[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let singular_values = cols.iter().map(|c| c.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()).collect();
    RightSvd { singular_values, v }
}

/// Orthonormal basis of the null space of a real matrix: right singular
/// vectors whose singular value is at most `rel_tol * sigma_max`.
pub fn null_space<T: Real>(a: &Matrix<T>, rel_tol: T) -> Vec<Vec<T>> {
    null_space_scaled(a, rel_tol, T::zero())
}

/// Like [`null_space`] with the threshold `rel_tol * max(sigma_max, scale)`,
/// so that a map that is zero up to rounding has a full null space.
pub fn null_space_scaled<T: Real>(a: &Matrix<T>, rel_tol: T, scale: T) -> Vec<Vec<T>> {
    let n = a.cols();
    if a.rows() == 0 {
        return (0..n).map(|j| Matrix::<T>::identity(n).column(j)).collect();
    }
    let svd = right_svd(a);
    let smax = svd.singular_values.iter().fold(scale, |acc, &s| acc.max(s));
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax.is_zero() || s <= rel_tol * smax)
        .map(|(j, _)| svd.v.column(j))
        .collect()
}

/// Least-squares residual of projecting `x` onto the span of the
/// orthonormal real vectors `basis`.
pub fn projection_residual<T: Real>(basis: &[Vec<T>], x: &[T]) -> T {
    let mut r = x.to_vec();
    for b in basis {
        let c = b.iter().zip(&r).fold(T::zero(), |acc, (&u, &v)| acc + u * v);
        for (ri, &bi) in r.iter_mut().zip(b) {
            *ri -= c * bi;
        }
    }
    r.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn rank_of_simple_matrices() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 1.0, 1.0]]).unwrap();
        assert_eq!(rank(&m, 1e-10), 2);
        assert_eq!(rank(&Matrix::<f64>::identity(4), 1e-10), 4);
        assert_eq!(rank(&Matrix::<f64>::zeros(3, 2), 1e-10), 0);
    }

    #[test]
    fn determinants() {
        let m = Matrix::from_rows(vec![vec![2.0f64, 1.0], vec![1.0, 3.0]]).unwrap();
        assert!((m.determinant() - 5.0).abs() < 1e-14);
        let c = Matrix::from_rows(vec![
            vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
        ])
        .unwrap();
        // i*i - 1 = -2
        assert!((c.determinant() - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = Matrix::from_rows(vec![vec![1.0f64, 1.0, 0.0], vec![2.0, 2.0, 0.0]]).unwrap();
        let ns = null_space(&m, 1e-10);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let mv = m.mul_vec(v).unwrap();
            assert!(mv.iter().all(|x| x.abs() < 1e-12));
        }
    }

    #[test]
    fn svd_singular_values() {
        let m = Matrix::from_rows(vec![vec![3.0, 0.0], vec![4.0, 5.0]]).unwrap();
        let mut s = right_svd(&m).singular_values;
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // sigma^2 are eigenvalues of m^T m = [[25, 20], [20, 25]] -> 5, 45
        assert!((s[0] - 5f64.sqrt()).abs() < 1e-12);
        assert!((s[1] - 45f64.sqrt()).abs() < 1e-12);
    }
}
