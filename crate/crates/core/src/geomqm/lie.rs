//! Lie derivatives by flow transport, brackets of vector fields, linear
//! objects attached to matrices and the `d d_J` recovery of the symplectic
//! form.

use serde::{Deserialize, Serialize};

use super::fields::{
    constant_tensor11, gradient, jacobian_fd, rk4_step_with_tangent, Covariant2Field, ScalarField,
    Tensor11Field, TwoFormField, VectorField, MetricField,
};
use crate::qalg::Matrix;
use crate::scalar::Real;
use crate::{Error, Result};

/// Default transport step for Lie derivatives.
pub const LIE_STEP: f64 = 1e-5;

/// A tensor field that can be pulled back along a local diffeomorphism.
pub trait Transport<T: Real>: Clone + Send + Sync + 'static {
    type Value;

    fn field_dim(&self) -> usize;

    fn value(&self, x: &[T]) -> Result<Self::Value>;

    /// `(phi^* self)(x)` given `y = phi(x)` and `m = D phi(x)`.
    fn pulled_back(&self, y: &[T], m: &Matrix<T>) -> Result<Self::Value>;

    /// `(a - b) * s`.
    fn scaled_difference(a: Self::Value, b: Self::Value, s: T) -> Self::Value;

    fn from_values(dim: usize, f: impl Fn(&[T]) -> Result<Self::Value> + Send + Sync + 'static) -> Self;
}

impl<T: Real> Transport<T> for ScalarField<T> {
    type Value = T;

    fn field_dim(&self) -> usize {
        self.dim()
    }
    fn value(&self, x: &[T]) -> Result<T> {
        self.eval(x)
    }
    fn pulled_back(&self, y: &[T], _m: &Matrix<T>) -> Result<T> {
        self.eval(y)
    }
    fn scaled_difference(a: T, b: T, s: T) -> T {
        (a - b) * s
    }
    fn from_values(dim: usize, f: impl Fn(&[T]) -> Result<T> + Send + Sync + 'static) -> Self {
        ScalarField::new(dim, f)
    }
}

impl<T: Real> Transport<T> for VectorField<T> {
    type Value = Vec<T>;

    fn field_dim(&self) -> usize {
        self.dim()
    }
    fn value(&self, x: &[T]) -> Result<Vec<T>> {
        self.eval(x)
    }
    fn pulled_back(&self, y: &[T], m: &Matrix<T>) -> Result<Vec<T>> {
        m.inverse()?.mul_vec(&self.eval(y)?)
    }
    fn scaled_difference(a: Vec<T>, b: Vec<T>, s: T) -> Vec<T> {
        a.iter().zip(&b).map(|(&u, &v)| (u - v) * s).collect()
    }
    fn from_values(dim: usize, f: impl Fn(&[T]) -> Result<Vec<T>> + Send + Sync + 'static) -> Self {
        VectorField::new(dim, f)
    }
}

impl<T: Real> Transport<T> for Tensor11Field<T> {
    type Value = Matrix<T>;

    fn field_dim(&self) -> usize {
        self.dim()
    }
    fn value(&self, x: &[T]) -> Result<Matrix<T>> {
        self.eval(x)
    }
    fn pulled_back(&self, y: &[T], m: &Matrix<T>) -> Result<Matrix<T>> {
        Ok(&(&m.inverse()? * &self.eval(y)?) * m)
    }
    fn scaled_difference(a: Matrix<T>, b: Matrix<T>, s: T) -> Matrix<T> {
        (&a - &b).scale(s)
    }
    fn from_values(dim: usize, f: impl Fn(&[T]) -> Result<Matrix<T>> + Send + Sync + 'static) -> Self {
        Tensor11Field::new(dim, f)
    }
}

impl<T: Real> Transport<T> for Covariant2Field<T> {
    type Value = Matrix<T>;

    fn field_dim(&self) -> usize {
        self.dim()
    }
    fn value(&self, x: &[T]) -> Result<Matrix<T>> {
        self.eval(x)
    }
    fn pulled_back(&self, y: &[T], m: &Matrix<T>) -> Result<Matrix<T>> {
        Ok(&(&m.transpose() * &self.eval(y)?) * m)
    }
    fn scaled_difference(a: Matrix<T>, b: Matrix<T>, s: T) -> Matrix<T> {
        (&a - &b).scale(s)
    }
    fn from_values(dim: usize, f: impl Fn(&[T]) -> Result<Matrix<T>> + Send + Sync + 'static) -> Self {
        Covariant2Field::new(dim, f)
    }
}

/// `L_X T` at `x`: transport `x` by one RK4 step of length `+-step` along
/// `X`, pull `T` back with the step's tangent map, central difference.
pub fn lie_derivative_at<T: Real, F: Transport<T>>(x_field: &VectorField<T>, t: &F, x: &[T], step: T) -> Result<F::Value> {
    let (yp, mp) = rk4_step_with_tangent(x_field, x, step)?;
    let (ym, mm) = rk4_step_with_tangent(x_field, x, -step)?;
    let a = t.pulled_back(&yp, &mp)?;
    let b = t.pulled_back(&ym, &mm)?;
    Ok(F::scaled_difference(a, b, T::one() / (step + step)))
}

/// `L_X T` as a field of the same kind.
pub fn lie_derivative<T: Real, F: Transport<T>>(x_field: &VectorField<T>, t: &F, step: T) -> Result<F> {
    if x_field.dim() != t.field_dim() {
        return Err(Error::Dimension("vector field and tensor live on different spaces".into()));
    }
    let (xf, tf) = (x_field.clone(), t.clone());
    Ok(F::from_values(t.field_dim(), move |x| lie_derivative_at(&xf, &tf, x, step)))
}

/// `[X, Y] = DY X - DX Y`.
pub fn lie_bracket<T: Real>(x: &VectorField<T>, y: &VectorField<T>) -> Result<VectorField<T>> {
    if x.dim() != y.dim() {
        return Err(Error::Dimension("vector fields on different spaces".into()));
    }
    let (xf, yf) = (x.clone(), y.clone());
    Ok(VectorField::new(x.dim(), move |p| {
        let a = yf.jacobian(p)?.mul_vec(&xf.eval(p)?)?;
        let b = xf.jacobian(p)?.mul_vec(&yf.eval(p)?)?;
        Ok(a.iter().zip(&b).map(|(&u, &v)| u - v).collect())
    }))
}

/// `X_A(x) = A x` and the constant tensor `T_A`.
pub fn linear_objects<T: Real>(a: &Matrix<T>) -> Result<(VectorField<T>, Tensor11Field<T>)> {
    if !a.is_square() {
        return Err(Error::Dimension("linear objects need a square matrix".into()));
    }
    Ok((VectorField::linear(a.clone()), constant_tensor11(a.clone())))
}

/// Contraction `T(X)` of a (1,1)-tensor with a vector field.
pub fn contract<T: Real>(t: &Tensor11Field<T>, x: &VectorField<T>) -> Result<VectorField<T>> {
    if x.dim() != t.dim() {
        return Err(Error::Dimension("tensor and vector field on different spaces".into()));
    }
    let (tf, xf) = (t.clone(), x.clone());
    Ok(VectorField::new(x.dim(), move |p| tf.eval(p)?.mul_vec(&xf.eval(p)?)))
}

/// Result of recovering `omega` from `d d_J (1/2 g(Delta, Delta))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DjFit<T> {
    /// `c` with `d d_J g = c omega` (least squares over the samples).
    pub constant: T,
    /// Largest `|d d_J g - c omega| / |omega|` over the samples.
    pub spread: T,
}

/// Steps for the nested central differences in [`dj_form`].
const DJ_INNER_STEP: f64 = 1e-5;
const DJ_OUTER_STEP: f64 = 1e-4;

/// The 2-form `d alpha` with `alpha(X) = -d(1/2 g(Delta, Delta))(J X)`.
pub fn dj_form<T: Real>(g: &MetricField<T>, j: &Tensor11Field<T>, delta: &VectorField<T>) -> TwoFormField<T> {
    let (g, j, delta) = (g.clone(), j.clone(), delta.clone());
    let dim = g.dim();
    let potential = move |x: &[T]| -> Result<T> {
        let d = delta.eval(x)?;
        let gd = g.eval(x)?.mul_vec(&d)?;
        Ok(T::lit(0.5) * d.iter().zip(&gd).fold(T::zero(), |acc, (&u, &v)| acc + u * v))
    };
    let alpha = move |x: &[T]| -> Result<Vec<T>> {
        let grad = gradient(&potential, x, T::lit(DJ_INNER_STEP))?;
        // alpha_k = -sum_i grad_i J_ik
        let jm = j.eval(x)?;
        Ok((0..x.len()).map(|k| -(0..x.len()).fold(T::zero(), |acc, i| acc + grad[i] * jm[(i, k)])).collect())
    };
    TwoFormField::new(dim, move |x| {
        let da = jacobian_fd(&alpha, x, T::lit(DJ_OUTER_STEP))?;
        // (d alpha)_ij = d_i alpha_j - d_j alpha_i, da[(j, i)] = d_i alpha_j
        Ok(Matrix::from_fn(x.len(), x.len(), |i, k| da[(k, i)] - da[(i, k)]))
    })
}

/// `omega = J^{-T} g`, from `g(X, Y) = omega(J X, Y)`.
pub fn omega_from<T: Real>(g: &MetricField<T>, j: &Tensor11Field<T>) -> TwoFormField<T> {
    let (g, j) = (g.clone(), j.clone());
    TwoFormField::new(g.dim(), move |x| Ok(&j.eval(x)?.transpose().inverse()? * &g.eval(x)?))
}

/// Fits `d d_J (1/2 g(Delta, Delta)) = c omega` over `points`. A spread above
/// `tol` means the recovered form is not a constant multiple of `omega`,
/// which is reported as an error.
pub fn dj_recovery<T: Real>(
    g: &MetricField<T>,
    j: &Tensor11Field<T>,
    delta: &VectorField<T>,
    points: &[Vec<T>],
    tol: T,
) -> Result<(TwoFormField<T>, DjFit<T>)> {
    let form = dj_form(g, j, delta);
    let omega = omega_from(g, j);
    let mut pairs = Vec::with_capacity(points.len());
    let (mut num, mut den) = (T::zero(), T::zero());
    for p in points {
        let r = form.eval(p)?;
        let w = omega.eval(p)?;
        for (a, b) in r.data().iter().zip(w.data()) {
            num += *a * *b;
            den += *b * *b;
        }
        pairs.push((r, w));
    }
    if den.is_zero() {
        return Err(Error::Validation("symplectic form vanishes at every sample".into()));
    }
    let c = num / den;
    let spread = pairs.iter().fold(T::zero(), |acc, (r, w)| {
        acc.max(r.max_abs_diff(&w.scale(c)) / w.max_abs().max(T::min_positive_value()))
    });
    if spread > tol {
        return Err(Error::Validation(format!(
            "d d_J g is not a constant multiple of omega (fitted {c}, spread {spread:e})"
        )));
    }
    Ok((form, DjFit { constant: c, spread }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomqm::fields::canonical_block;
    use crate::random;

    #[test]
    fn lie_derivative_of_constant_tensor_along_linear_field() {
        let mut rng = random::rng_from_seed(5);
        let a = random::matrix::<f64>(&mut rng, 4, 4);
        let b = random::matrix::<f64>(&mut rng, 4, 4);
        let (xa, _) = linear_objects(&a).unwrap();
        let (_, tb) = linear_objects(&b).unwrap();
        let l = lie_derivative(&xa, &tb, 1e-5).unwrap();
        let expect = Matrix::commutator(&a, &b).unwrap().scale(-1.0);
        let x = random::vector::<f64>(&mut rng, 4);
        assert!(l.eval(&x).unwrap().max_abs_diff(&expect) < 1e-8);
    }

    #[test]
    fn bracket_of_linear_fields() {
        let mut rng = random::rng_from_seed(6);
        let a = random::matrix::<f64>(&mut rng, 4, 4);
        let b = random::matrix::<f64>(&mut rng, 4, 4);
        let br = lie_bracket(&VectorField::linear(a.clone()), &VectorField::linear(b.clone())).unwrap();
        let c = Matrix::commutator(&a, &b).unwrap();
        let x = random::vector::<f64>(&mut rng, 4);
        let lhs = br.eval(&x).unwrap();
        let rhs: Vec<f64> = c.mul_vec(&x).unwrap().iter().map(|v| -v).collect();
        assert!(lhs.iter().zip(&rhs).all(|(u, v)| (u - v).abs() < 1e-12));
    }

    #[test]
    fn identity_field_is_liouville() {
        let (x, t) = linear_objects(&Matrix::<f64>::identity(2)).unwrap();
        assert_eq!(x.eval(&[0.3, -0.7]).unwrap(), vec![0.3, -0.7]);
        assert_eq!(contract(&t, &x).unwrap().eval(&[0.3, -0.7]).unwrap(), vec![0.3, -0.7]);
    }

    #[test]
    fn dj_constant_is_minus_two() {
        let w = canonical_block::<f64>(1);
        let g = super::super::fields::constant_covariant(Matrix::identity(2));
        let j = constant_tensor11(w);
        let delta = VectorField::linear(Matrix::identity(2));
        let pts = vec![vec![0.3, 0.4], vec![-1.0, 2.0], vec![0.0, 0.5]];
        let (_, fit) = dj_recovery(&g, &j, &delta, &pts, 1e-6).unwrap();
        assert!((fit.constant + 2.0).abs() < 1e-6);
    }
}
