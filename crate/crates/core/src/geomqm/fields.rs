//! Tensor fields on open subsets of `R^d` given by component evaluators.
//!
//! Components are taken in the global chart `(q_1..q_n, p_1..p_n)`. A
//! (1,1)-tensor is a matrix `M` acting on vector components as `M v`; a
//! covariant 2-tensor `B` evaluates as `B(u, v) = u^T B v`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::qalg::Matrix;
use crate::scalar::Real;
use crate::{Error, Result};

type Eval<T, V> = Arc<dyn Fn(&[T]) -> Result<V> + Send + Sync>;

/// Default central-difference step for first derivatives.
pub const GRADIENT_STEP: f64 = 1e-6;

fn check_dim<T>(x: &[T], dim: usize) -> Result<()> {
    if x.len() == dim {
        Ok(())
    } else {
        Err(Error::Dimension(format!("point has {} coordinates, field expects {}", x.len(), dim)))
    }
}

macro_rules! field_type {
    ($(#[$doc:meta])* $name:ident, $value:ty) => {
        $(#[$doc])*
        #[derive(Clone)]
        pub struct $name<T> {
            dim: usize,
            eval: Eval<T, $value>,
        }

        impl<T: Real> $name<T> {
            pub fn new(dim: usize, f: impl Fn(&[T]) -> Result<$value> + Send + Sync + 'static) -> Self {
                $name { dim, eval: Arc::new(f) }
            }

            pub fn dim(&self) -> usize {
                self.dim
            }

            pub fn eval(&self, x: &[T]) -> Result<$value> {
                check_dim(x, self.dim)?;
                (self.eval)(x)
            }
        }

        impl<T> fmt::Debug for $name<T> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}(dim = {})", stringify!($name), self.dim)
            }
        }
    };
}

field_type!(
    /// Real function.
    ScalarField,
    T
);
field_type!(
    /// Complex-valued function, for Hermitian-valued quadratic functions.
    ComplexScalarField,
    Complex<T>
);
field_type!(
    /// Mixed (1,1) tensor: `x -> M(x)`.
    Tensor11Field,
    Matrix<T>
);
field_type!(
    /// Covariant 2-tensor: metrics and 2-forms.
    Covariant2Field,
    Matrix<T>
);

field_type!(
    /// Contravariant 2-tensor: inverse metrics and Poisson bivectors.
    Contravariant2Field,
    Matrix<T>
);

pub type MetricField<T> = Covariant2Field<T>;
pub type TwoFormField<T> = Covariant2Field<T>;

/// Vector field with an optional analytic Jacobian `DX`.
#[derive(Clone)]
pub struct VectorField<T> {
    dim: usize,
    eval: Eval<T, Vec<T>>,
    jacobian: Option<Eval<T, Matrix<T>>>,
}

impl<T> fmt::Debug for VectorField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField(dim = {}, analytic jacobian = {})", self.dim, self.jacobian.is_some())
    }
}

impl<T: Real> VectorField<T> {
    pub fn new(dim: usize, f: impl Fn(&[T]) -> Result<Vec<T>> + Send + Sync + 'static) -> Self {
        VectorField { dim, eval: Arc::new(f), jacobian: None }
    }

    pub fn with_jacobian(mut self, j: impl Fn(&[T]) -> Result<Matrix<T>> + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(j));
        self
    }

    /// `x -> A x`, with Jacobian `A`.
    pub fn linear(a: Matrix<T>) -> Self {
        let dim = a.cols();
        let a2 = a.clone();
        VectorField::new(dim, move |x| a.mul_vec(x)).with_jacobian(move |_| Ok(a2.clone()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(x, self.dim)?;
        let v = (self.eval)(x)?;
        if v.len() != self.dim {
            return Err(Error::Dimension("vector field returned wrong number of components".into()));
        }
        Ok(v)
    }

    /// `DX(x)[i][j] = d X^i / d x^j`, analytic if available, else central
    /// differences.
    pub fn jacobian(&self, x: &[T]) -> Result<Matrix<T>> {
        check_dim(x, self.dim)?;
        match &self.jacobian {
            Some(j) => j(x),
            None => jacobian_fd(|y| self.eval(y), x, T::lit(GRADIENT_STEP)),
        }
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }
}

/// Central-difference gradient.
pub fn gradient<T: Real>(f: impl Fn(&[T]) -> Result<T>, x: &[T], h: T) -> Result<Vec<T>> {
    let mut y = x.to_vec();
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        y[i] = x[i] + h;
        let fp = f(&y)?;
        y[i] = x[i] - h;
        let fm = f(&y)?;
        y[i] = x[i];
        g.push((fp - fm) / (h + h));
    }
    Ok(g)
}

pub fn complex_gradient<T: Real>(f: impl Fn(&[T]) -> Result<Complex<T>>, x: &[T], h: T) -> Result<Vec<Complex<T>>> {
    let re = gradient(|y| f(y).map(|z| z.re), x, h)?;
    let im = gradient(|y| f(y).map(|z| z.im), x, h)?;
    Ok(re.into_iter().zip(im).map(|(a, b)| Complex::new(a, b)).collect())
}

/// Central-difference Jacobian `J[i][j] = d F_i / d x_j`.
pub fn jacobian_fd<T: Real>(f: impl Fn(&[T]) -> Result<Vec<T>>, x: &[T], h: T) -> Result<Matrix<T>> {
    let n = x.len();
    let mut y = x.to_vec();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        y[j] = x[j] + h;
        let fp = f(&y)?;
        y[j] = x[j] - h;
        let fm = f(&y)?;
        y[j] = x[j];
        cols.push(fp.iter().zip(&fm).map(|(&a, &b)| (a - b) / (h + h)).collect::<Vec<T>>());
    }
    Matrix::from_columns(&cols)
}

/// Central difference of a matrix-valued map along coordinate `k`.
pub fn partial_matrix<T: Real>(f: impl Fn(&[T]) -> Result<Matrix<T>>, x: &[T], k: usize, h: T) -> Result<Matrix<T>> {
    let mut y = x.to_vec();
    y[k] = x[k] + h;
    let fp = f(&y)?;
    y[k] = x[k] - h;
    let fm = f(&y)?;
    Ok((&fp - &fm).scale(T::one() / (h + h)))
}

/// Largest component of the exterior derivative of a 2-form,
/// `(d w)_{ijk} = d_i w_jk + d_j w_ki + d_k w_ij`.
pub fn exterior_derivative_defect<T: Real>(w: &TwoFormField<T>, x: &[T], h: T) -> Result<T> {
    let d = w.dim();
    let partials: Vec<Matrix<T>> = (0..d).map(|k| partial_matrix(|y| w.eval(y), x, k, h)).collect::<Result<_>>()?;
    let mut worst = T::zero();
    for i in 0..d {
        for j in i + 1..d {
            for k in j + 1..d {
                let v = partials[i][(j, k)] + partials[j][(k, i)] + partials[k][(i, j)];
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// One classical RK4 step of `x' = X(x)` together with its tangent map
/// (the derivative of the step with respect to the initial point).
pub fn rk4_step_with_tangent<T: Real>(field: &VectorField<T>, x: &[T], h: T) -> Result<(Vec<T>, Matrix<T>)> {
    let n = x.len();
    let half = h * T::lit(0.5);
    let id = Matrix::<T>::identity(n);
    let axpy = |a: &[T], s: T, b: &[T]| a.iter().zip(b).map(|(&u, &v)| u + s * v).collect::<Vec<T>>();

    let k1 = field.eval(x)?;
    let j1 = field.jacobian(x)?;
    let x2 = axpy(x, half, &k1);
    let k2 = field.eval(&x2)?;
    let m1 = &id + &j1.scale(half);
    let j2 = &field.jacobian(&x2)? * &m1;
    let x3 = axpy(x, half, &k2);
    let k3 = field.eval(&x3)?;
    let m2 = &id + &j2.scale(half);
    let j3 = &field.jacobian(&x3)? * &m2;
    let x4 = axpy(x, h, &k3);
    let k4 = field.eval(&x4)?;
    let m3 = &id + &j3.scale(h);
    let j4 = &field.jacobian(&x4)? * &m3;

    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    let next: Vec<T> = (0..n).map(|i| x[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i])).collect();
    let sum = &(&(&j1 + &j2.scale(two)) + &j3.scale(two)) + &j4;
    let tangent = &id + &sum.scale(sixth);
    Ok((next, tangent))
}

/// Integrates `x' = X(x)` for time `t` with steps of at most `dt`.
pub fn flow<T: Real>(field: &VectorField<T>, x: &[T], t: T, dt: T) -> Result<Vec<T>> {
    let steps = (t.abs() / dt).ceil().to_usize().unwrap_or(0).max(1);
    let h = t / T::from_usize_lossy(steps);
    let mut y = x.to_vec();
    for _ in 0..steps {
        y = rk4_plain(field, &y, h)?;
    }
    Ok(y)
}

fn rk4_plain<T: Real>(field: &VectorField<T>, x: &[T], h: T) -> Result<Vec<T>> {
    let half = h * T::lit(0.5);
    let axpy = |a: &[T], s: T, b: &[T]| a.iter().zip(b).map(|(&u, &v)| u + s * v).collect::<Vec<T>>();
    let k1 = field.eval(x)?;
    let k2 = field.eval(&axpy(x, half, &k1))?;
    let k3 = field.eval(&axpy(x, half, &k2))?;
    let k4 = field.eval(&axpy(x, h, &k3))?;
    let two = T::lit(2.0);
    let sixth = h / T::lit(6.0);
    Ok((0..x.len()).map(|i| x[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i])).collect())
}

/// Constant (1,1)-tensor or covariant field.
pub fn constant_tensor11<T: Real>(m: Matrix<T>) -> Tensor11Field<T> {
    Tensor11Field::new(m.rows(), move |_| Ok(m.clone()))
}

pub fn constant_covariant<T: Real>(m: Matrix<T>) -> Covariant2Field<T> {
    Covariant2Field::new(m.rows(), move |_| Ok(m.clone()))
}

pub fn constant_contravariant<T: Real>(m: Matrix<T>) -> Contravariant2Field<T> {
    Contravariant2Field::new(m.rows(), move |_| Ok(m.clone()))
}

/// `[[0, I], [-I, 0]]`, the matrix of `sum dq_k ^ dp_k` and of the standard
/// complex structure.
pub fn canonical_block<T: Real>(n: usize) -> Matrix<T> {
    Matrix::from_fn(2 * n, 2 * n, |i, j| {
        if j == i + n {
            T::one()
        } else if i == j + n {
            -T::one()
        } else {
            T::zero()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_gradient_of_quadratic_is_exact() {
        let g = gradient(|x: &[f64]| Ok(x[0] * x[0] + 3.0 * x[0] * x[1]), &[1.0, 2.0], 1e-3).unwrap();
        assert!((g[0] - 8.0).abs() < 1e-10 && (g[1] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn rk4_tangent_matches_linear_flow() {
        // x' = A x has flow exp(tA); RK4 tangent is the degree-4 Taylor polynomial
        let a = Matrix::from_rows(vec![vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let f = VectorField::linear(a);
        let (y, m) = rk4_step_with_tangent(&f, &[1.0, 0.0], 0.1).unwrap();
        let (c, s) = (0.1f64.cos(), 0.1f64.sin());
        assert!((y[0] - c).abs() < 1e-7 && (y[1] + s).abs() < 1e-7);
        assert!((m[(0, 0)] - c).abs() < 1e-7 && (m[(0, 1)] - s).abs() < 1e-7);
    }

    #[test]
    fn wrong_dimension_is_an_error() {
        let f = ScalarField::new(2, |x: &[f64]| Ok(x[0]));
        assert!(f.eval(&[1.0]).is_err());
    }

    #[test]
    fn canonical_form_is_closed() {
        let w = constant_covariant(canonical_block::<f64>(2));
        assert_eq!(exterior_derivative_defect(&w, &[0.1, 0.2, 0.3, 0.4], 1e-5).unwrap(), 0.0);
    }
}
