use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{Float, One, Zero};

use crate::scalar::{Real, Scalar};
use crate::{Error, Result};

/// Dense row-major matrix over a [`Scalar`].
///
/// Quaternionic matrices act on right quaternionic column vectors: the
/// matrix multiplies from the left, scalars from the right.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_diagonal(d: &[S]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { d[i] } else { S::zero() })
    }

    pub fn from_real_diagonal(d: &[S::Real]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |i, j| if i == j { S::from_real(d[i]) } else { S::zero() })
    }

    /// Columns given as vectors.
    pub fn from_columns(cols: &[Vec<S>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|v| v.len() != r) {
            return Err(Error::Dimension("columns of unequal length".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| cols[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[S]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn diagonal(&self) -> Vec<S> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(S) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, r: S::Real) -> Self {
        self.map(|x| x.scale(r))
    }

    /// `M q`: every entry multiplied by `q` on the right.
    pub fn mul_scalar_right(&self, q: S) -> Self {
        self.map(|x| x * q)
    }

    /// `q M`.
    pub fn mul_scalar_left(&self, q: S) -> Self {
        self.map(|x| q * x)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = out.data[idx] + a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).fold(S::zero(), |acc, j| acc + self[(i, j)] * v[j]))
            .collect())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(S, S) -> S) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!(
                "shapes {:?} and {:?} differ",
                self.shape(),
                other.shape()
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `AB - BA`.
    pub fn commutator(a: &Self, b: &Self) -> Result<Self> {
        a.matmul(b)?.try_sub(&b.matmul(a)?)
    }

    pub fn frobenius_norm(&self) -> S::Real {
        self.data.iter().fold(S::Real::zero(), |acc, x| acc + x.norm_sqr()).sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> S::Real {
        self.data.iter().fold(S::Real::zero(), |acc, x| acc.max(x.modulus()))
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> S::Real {
        match self.try_sub(other) {
            Ok(d) => d.max_abs(),
            Err(_) => S::Real::infinity(),
        }
    }

    pub fn trace(&self) -> S {
        self.diagonal().into_iter().fold(S::zero(), |a, b| a + b)
    }

    /// `max |A - A^dagger|` relative to `max(1, max|A|)`.
    pub fn hermitian_defect(&self) -> S::Real {
        if !self.is_square() {
            return S::Real::infinity();
        }
        self.max_abs_diff(&self.adjoint()) / S::Real::one().max(self.max_abs())
    }

    pub fn is_hermitian(&self, tol: S::Real) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Gauss-Jordan inverse with partial pivoting by modulus. Only left
    /// multiplications are used on rows, so this is valid over quaternions.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs();
        if scale.is_zero() {
            return Err(Error::Singular);
        }
        let eps = S::Real::epsilon() * S::Real::from_usize_lossy(n.max(1) * 16) * scale;
        for col in 0..n {
            let (piv, pmax) = (col..n)
                .map(|r| (r, a[(r, col)].modulus()))
                .fold((col, S::Real::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= eps {
                return Err(Error::Singular);
            }
            a.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            let p_inv = a[(col, col)].inv().ok_or(Error::Singular)?;
            for j in 0..n {
                a[(col, j)] = p_inv * a[(col, j)];
                inv[(col, j)] = p_inv * inv[(col, j)];
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a[(r, j)] = a[(r, j)] - f * a[(col, j)];
                    inv[(r, j)] = inv[(r, j)] - f * inv[(col, j)];
                }
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Cholesky factor `L` (lower triangular, real positive diagonal) with
    /// `self = L L^dagger`. Fails unless the matrix is Hermitian positive
    /// definite.
    pub fn cholesky(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("Cholesky of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].re();
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > S::Real::zero()) {
                return Err(Error::Validation("matrix is not positive definite".into()));
            }
            let djj = d.sqrt();
            l[(j, j)] = S::from_real(djj);
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s.scale(S::Real::one() / djj);
            }
        }
        Ok(l)
    }

    /// Solves `L y = b` for lower triangular `L` with real diagonal.
    pub fn solve_lower(&self, b: &[S]) -> Result<Vec<S>> {
        let n = self.rows;
        let mut y = vec![S::zero(); n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s = s - self[(i, k)] * y[k];
            }
            y[i] = self[(i, i)].inv().ok_or(Error::Singular)? * s;
        }
        Ok(y)
    }
}

impl<S: Scalar> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S: Scalar> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

// Operator sugar panics on shape mismatch; the `try_*` / `matmul` methods
// return errors instead.
impl<S: Scalar> Mul for &Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, rhs: Self) -> Matrix<S> {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl<S: Scalar> Add for &Matrix<S> {
    type Output = Matrix<S>;
    fn add(self, rhs: Self) -> Matrix<S> {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl<S: Scalar> Sub for &Matrix<S> {
    type Output = Matrix<S>;
    fn sub(self, rhs: Self) -> Matrix<S> {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl<S: Scalar> Neg for &Matrix<S> {
    type Output = Matrix<S>;
    fn neg(self) -> Matrix<S> {
        self.map(|x| -x)
    }
}

/// `sum conj(x_i) y_i`, right-linear in `y`.
pub fn inner<S: Scalar>(x: &[S], y: &[S]) -> S {
    x.iter().zip(y).fold(S::zero(), |acc, (&a, &b)| acc + a.conj() * b)
}

pub fn vec_norm<S: Scalar>(x: &[S]) -> S::Real {
    x.iter().fold(S::Real::zero(), |acc, v| acc + v.norm_sqr()).sqrt()
}

/// `x q` for a vector `x` and scalar `q`.
pub fn vec_mul_right<S: Scalar>(x: &[S], q: S) -> Vec<S> {
    x.iter().map(|&v| v * q).collect()
}

pub fn vec_sub<S: Scalar>(x: &[S], y: &[S]) -> Vec<S> {
    x.iter().zip(y).map(|(&a, &b)| a - b).collect()
}

pub fn vec_add<S: Scalar>(x: &[S], y: &[S]) -> Vec<S> {
    x.iter().zip(y).map(|(&a, &b)| a + b).collect()
}

/// Unit vector in the direction of `x`, or `None` if `x` is (numerically) zero.
pub fn normalized<S: Scalar>(x: &[S]) -> Option<Vec<S>> {
    let n = vec_norm(x);
    if n <= S::Real::min_positive_value() {
        None
    } else {
        Some(x.iter().map(|v| v.scale(S::Real::one() / n)).collect())
    }
}

/// Copies the real components of every entry into one flat real vector
/// (row-major, `REAL_DIM` reals per entry).
pub fn realify<S: Scalar>(m: &Matrix<S>) -> Vec<S::Real> {
    let mut out = Vec::with_capacity(m.data.len() * S::REAL_DIM);
    for x in &m.data {
        for k in 0..S::REAL_DIM {
            out.push(x.component(k));
        }
    }
    out
}

pub fn derealify<S: Scalar>(rows: usize, cols: usize, v: &[S::Real]) -> Matrix<S> {
    let d = S::REAL_DIM;
    Matrix::from_fn(rows, cols, |i, j| {
        let o = (i * cols + j) * d;
        S::from_components(&v[o..o + d])
    })
}

/// Matrix of the real-linear map `f` on `rows x cols` matrices over `S`,
/// expressed in the basis `E_ij * unit_k`.
pub fn realify_operator<S: Scalar>(
    rows: usize,
    cols: usize,
    f: impl Fn(&Matrix<S>) -> Result<Matrix<S>>,
) -> Result<Matrix<S::Real>> {
    let d = S::REAL_DIM;
    let dim = rows * cols * d;
    let mut columns: Vec<Vec<S::Real>> = Vec::with_capacity(dim);
    for i in 0..rows {
        for j in 0..cols {
            for k in 0..d {
                let mut e = Matrix::<S>::zeros(rows, cols);
                e[(i, j)] = S::unit(k);
                columns.push(realify(&f(&e)?));
            }
        }
    }
    let out_len = columns.first().map_or(0, Vec::len);
    Ok(Matrix::from_fn(out_len, dim, |r, c| columns[c][r]))
}

impl<T: Real> Matrix<T> {
    /// Real symmetric check without conjugation overhead.
    pub fn symmetric_defect(&self) -> T {
        self.max_abs_diff(&self.transpose())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::qalg::Quaternion;
    use num_complex::Complex64;

    type Q = Quaternion<f64>;

    #[test]
    fn adjoint_is_involution_and_reverses_products() {
        let m = Matrix::from_rows(vec![
            vec![Q::new(1.0, 2.0, 0.0, -1.0), Q::j()],
            vec![Q::k(), Q::new(0.5, 0.0, 3.0, 0.0)],
        ])
        .unwrap();
        let n = Matrix::from_rows(vec![
            vec![Q::i(), Q::new(2.0, 1.0, 1.0, 1.0)],
            vec![Q::one(), Q::new(0.0, -1.0, 0.0, 2.0)],
        ])
        .unwrap();
        assert_eq!(m.adjoint().adjoint(), m);
        let lhs = (&m * &n).adjoint();
        let rhs = &n.adjoint() * &m.adjoint();
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }

    #[test]
    fn inverse_over_quaternions() {
        let m = Matrix::from_rows(vec![
            vec![Q::new(2.0, 0.0, 1.0, 0.0), Q::j()],
            vec![Q::k(), Q::new(3.0, 1.0, 0.0, 0.0)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).max_abs_diff(&Matrix::identity(2)) < 1e-14);
        assert!((&inv * &m).max_abs_diff(&Matrix::identity(2)) < 1e-14);
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(m.inverse(), Err(Error::Singular));
    }

    #[test]
    fn cholesky_reconstructs() {
        let h = Matrix::from_rows(vec![
            vec![Complex64::new(4.0, 0.0), Complex64::new(1.0, 1.0)],
            vec![Complex64::new(1.0, -1.0), Complex64::new(3.0, 0.0)],
        ])
        .unwrap();
        let l = h.cholesky().unwrap();
        assert!((&l * &l.adjoint()).max_abs_diff(&h) < 1e-14);
        let bad = Matrix::from_real_diagonal(&[1.0, -1.0]);
        assert!(Matrix::<Complex64>::cholesky(&bad).is_err());
    }

    #[test]
    fn realify_roundtrip() {
        let m = Matrix::from_rows(vec![vec![Q::new(1.0, 2.0, 3.0, 4.0), Q::k()]]).unwrap();
        let v = realify(&m);
        assert_eq!(v.len(), 8);
        assert_eq!(derealify::<Q>(1, 2, &v), m);
    }
}
