//! Admissible triples: the standard oscillator structures and the family
//! obtained by pulling them back through the nonlinear chart
//! `(Q, P) = (q, p)(1 + lambda H_s)`, `H_s = (q^2 + p^2) / 2`, applied to
//! each pair `(q_k, p_k)`.

use serde::{Deserialize, Serialize};

use super::fields::{
    canonical_block, constant_contravariant, constant_covariant, constant_tensor11, exterior_derivative_defect,
    gradient, jacobian_fd, Contravariant2Field, MetricField, ScalarField, Tensor11Field, TwoFormField, VectorField,
    GRADIENT_STEP,
};
use crate::qalg::Matrix;
use crate::scalar::Real;
use crate::{Error, Result};

/// Newton iteration cap for the inverse chart.
pub const CHART_MAX_ITER: usize = 50;

#[derive(Debug, Clone)]
pub struct AdmissibleTriple<T> {
    pub g: MetricField<T>,
    pub omega: TwoFormField<T>,
    pub j: Tensor11Field<T>,
}

/// Worst defects of the admissibility conditions over a set of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport<T> {
    pub points: usize,
    /// `max |g - J^T omega|`, i.e. `g(X, Y) = omega(J X, Y)`.
    pub compatibility: T,
    /// `max |J^2 + I|`.
    pub complex_structure: T,
    pub metric_symmetry: T,
    pub form_antisymmetry: T,
    /// Finite-difference `d omega`.
    pub closedness: T,
    pub metric_positive: bool,
}

impl<T: Real> AdmissibilityReport<T> {
    pub fn max_defect(&self) -> T {
        self.compatibility
            .max(self.complex_structure)
            .max(self.metric_symmetry)
            .max(self.form_antisymmetry)
            .max(self.closedness)
    }

    pub fn holds(&self, tol: T) -> bool {
        self.metric_positive && self.max_defect() < tol
    }
}

impl<T: Real> AdmissibleTriple<T> {
    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// Evaluates every admissibility condition at `points`; `h` is the step
    /// for `d omega`.
    pub fn check(&self, points: &[Vec<T>], h: T) -> Result<AdmissibilityReport<T>> {
        let d = self.dim();
        let id = Matrix::<T>::identity(d);
        let mut r = AdmissibilityReport {
            points: points.len(),
            compatibility: T::zero(),
            complex_structure: T::zero(),
            metric_symmetry: T::zero(),
            form_antisymmetry: T::zero(),
            closedness: T::zero(),
            metric_positive: true,
        };
        for x in points {
            let g = self.g.eval(x)?;
            let w = self.omega.eval(x)?;
            let j = self.j.eval(x)?;
            r.compatibility = r.compatibility.max(g.max_abs_diff(&(&j.transpose() * &w)));
            r.complex_structure = r.complex_structure.max((&(&j * &j) + &id).max_abs());
            r.metric_symmetry = r.metric_symmetry.max(g.max_abs_diff(&g.transpose()));
            r.form_antisymmetry = r.form_antisymmetry.max(w.max_abs_diff(&w.transpose().scale(-T::one())));
            r.closedness = r.closedness.max(exterior_derivative_defect(&self.omega, x, h)?);
            if g.cholesky().is_err() {
                r.metric_positive = false;
            }
        }
        Ok(r)
    }
}

/// The flat oscillator structures on `R^2n`.
#[derive(Debug, Clone)]
pub struct StandardStructures<T> {
    pub n: usize,
    pub triple: AdmissibleTriple<T>,
    /// Liouville field `sum q_k d/dq_k + p_k d/dp_k`.
    pub delta: VectorField<T>,
    /// Poisson bivector `Lambda = sum d/dp_k ^ d/dq_k` (matrix `W^{-1}`).
    pub lambda: Contravariant2Field<T>,
}

impl<T: Real> StandardStructures<T> {
    /// `max |Lambda omega - I|` at `x`.
    pub fn lambda_omega_defect(&self, x: &[T]) -> Result<T> {
        let prod = &self.lambda.eval(x)? * &self.triple.omega.eval(x)?;
        Ok(prod.max_abs_diff(&Matrix::identity(2 * self.n)))
    }
}

/// `g = I`, `omega = sum dq_k ^ dp_k`, `J = sum dp_k (x) d/dq_k - dq_k (x) d/dp_k`.
pub fn standard_triple<T: Real>(n: usize) -> Result<StandardStructures<T>> {
    if n == 0 {
        return Err(Error::Dimension("need at least one degree of freedom".into()));
    }
    let w = canonical_block::<T>(n);
    Ok(StandardStructures {
        n,
        triple: AdmissibleTriple {
            g: constant_covariant(Matrix::identity(2 * n)),
            omega: constant_covariant(w.clone()),
            j: constant_tensor11(w.clone()),
        },
        delta: VectorField::linear(Matrix::identity(2 * n)),
        lambda: constant_contravariant(w.transpose()),
    })
}

/// `H_s = |x|^2 / 2`.
pub fn oscillator_hamiltonian<T: Real>(n: usize) -> ScalarField<T> {
    ScalarField::new(2 * n, |x: &[T]| Ok(T::lit(0.5) * x.iter().fold(T::zero(), |a, &v| a + v * v)))
}

/// `Gamma = sum p_k d/dq_k - q_k d/dp_k`.
pub fn oscillator_field<T: Real>(n: usize) -> VectorField<T> {
    VectorField::linear(canonical_block(n))
}

/// Solves `i_Gamma omega = dH`, i.e. `omega^T Gamma = grad H`, pointwise.
pub fn hamiltonian_field<T: Real>(h: &ScalarField<T>, omega: &TwoFormField<T>) -> Result<VectorField<T>> {
    if h.dim() != omega.dim() {
        return Err(Error::Dimension("function and form on different spaces".into()));
    }
    let (h, omega) = (h.clone(), omega.clone());
    Ok(VectorField::new(h.dim(), move |x| {
        let grad = gradient(|y| h.eval(y), x, T::lit(GRADIENT_STEP))?;
        omega.eval(x)?.transpose().inverse()?.mul_vec(&grad)
    }))
}

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if !(lambda >= T::zero()) || !lambda.is_finite() {
        return Err(Error::Domain(format!("chart parameter must be finite and non-negative, got {lambda}")));
    }
    Ok(())
}

fn check_even<T>(x: &[T]) -> Result<usize> {
    if x.is_empty() || !x.len().is_multiple_of(2) {
        return Err(Error::Dimension(format!("phase-space point needs an even number of coordinates, got {}", x.len())));
    }
    Ok(x.len() / 2)
}

/// `(Q_k, P_k) = (q_k, p_k)(1 + lambda (q_k^2 + p_k^2) / 2)`.
pub fn lambda_chart<T: Real>(x: &[T], lambda: T) -> Result<Vec<T>> {
    check_lambda(lambda)?;
    let n = check_even(x)?;
    let mut y = x.to_vec();
    for k in 0..n {
        let s = T::one() + lambda * T::lit(0.5) * (x[k] * x[k] + x[n + k] * x[n + k]);
        y[k] = x[k] * s;
        y[n + k] = x[n + k] * s;
    }
    Ok(y)
}

/// Inverse of [`lambda_chart`]: per pair, Newton on
/// `rho (1 + lambda rho / 2)^2 = R^2` for `rho = q^2 + p^2`.
pub fn inverse_lambda_chart<T: Real>(y: &[T], lambda: T) -> Result<Vec<T>> {
    check_lambda(lambda)?;
    let n = check_even(y)?;
    let half = T::lit(0.5);
    let mut x = y.to_vec();
    for k in 0..n {
        let r2 = y[k] * y[k] + y[n + k] * y[n + k];
        if r2.is_zero() || lambda.is_zero() {
            continue;
        }
        let residual = |rho: T| {
            let s = T::one() + lambda * half * rho;
            rho * s * s - r2
        };
        // convex and increasing on rho >= 0, so Newton from the right is monotone
        let mut rho = r2;
        let mut converged = false;
        for _ in 0..CHART_MAX_ITER {
            let s = T::one() + lambda * half * rho;
            let slope = s * (T::one() + T::lit(1.5) * lambda * rho);
            let step = residual(rho) / slope;
            rho -= step;
            if step.abs() <= T::lit(4.0) * T::epsilon() * rho {
                converged = true;
                break;
            }
        }
        let res = residual(rho).abs() / r2.max(T::one());
        if !converged || res > T::lit(1e-12).max(T::lit(16.0) * T::epsilon()) {
            return Err(Error::Numeric(format!("inverse chart did not converge (residual {res:e})")));
        }
        let s = T::one() + lambda * half * rho;
        x[k] = y[k] / s;
        x[n + k] = y[n + k] / s;
    }
    Ok(x)
}

/// Per-pair entries of the chart differential:
/// `dQ = d dq + b dp`, `dP = b dq + a dp`.
fn pair_differential<T: Real>(q: T, p: T, lambda: T) -> (T, T, T) {
    let mu = lambda * T::lit(0.5);
    let three = T::lit(3.0);
    let a = T::one() + mu * (q * q + three * p * p);
    let d = T::one() + mu * (three * q * q + p * p);
    let b = lambda * p * q;
    (a, b, d)
}

/// Analytic Jacobian of [`lambda_chart`].
pub fn lambda_chart_jacobian<T: Real>(x: &[T], lambda: T) -> Result<Matrix<T>> {
    check_lambda(lambda)?;
    let n = check_even(x)?;
    let mut m = Matrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        let (a, b, d) = pair_differential(x[k], x[n + k], lambda);
        m[(k, k)] = d;
        m[(k, n + k)] = b;
        m[(n + k, k)] = b;
        m[(n + k, n + k)] = a;
    }
    Ok(m)
}

/// `(1 + lambda H)(1 + 3 lambda H)` for one pair, the coefficient of
/// `dq ^ dp` in the deformed symplectic form.
pub fn symplectic_coefficient<T: Real>(q: T, p: T, lambda: T) -> T {
    let (a, b, d) = pair_differential(q, p, lambda);
    a * d - b * b
}

/// Structures on the `(q, p)` chart pulled back from the standard ones in
/// `(Q, P)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformedStructures<T> {
    pub n: usize,
    pub lambda: T,
}

/// Differences between the closed forms and finite-difference pullbacks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartDefects<T> {
    pub metric: T,
    pub symplectic: T,
    pub bracket: T,
}

impl<T: Real> ChartDefects<T> {
    pub fn max(&self) -> T {
        self.metric.max(self.symplectic).max(self.bracket)
    }
}

pub fn deformed_structures<T: Real>(n: usize, lambda: T) -> Result<DeformedStructures<T>> {
    check_lambda(lambda)?;
    if n == 0 {
        return Err(Error::Dimension("need at least one degree of freedom".into()));
    }
    Ok(DeformedStructures { n, lambda })
}

impl<T: Real> DeformedStructures<T> {
    fn per_pair(&self, x: &[T], f: impl Fn(T, T, T) -> [T; 4]) -> Result<Matrix<T>> {
        let n = self.n;
        if x.len() != 2 * n {
            return Err(Error::Dimension("point does not match the structure".into()));
        }
        let mut m = Matrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            let [qq, qp, pq, pp] = f(x[k], x[n + k], self.lambda);
            m[(k, k)] = qq;
            m[(k, n + k)] = qp;
            m[(n + k, k)] = pq;
            m[(n + k, n + k)] = pp;
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// `g_lambda = sum dQ_k (x) dQ_k + dP_k (x) dP_k`.
    pub fn metric_at(&self, x: &[T]) -> Result<Matrix<T>> {
        self.per_pair(x, |q, p, l| {
            let (a, b, d) = pair_differential(q, p, l);
            let off = b * (a + d);
            [b * b + d * d, off, off, a * a + b * b]
        })
    }

    /// `omega_lambda = sum dQ_k ^ dP_k = sum c_k dq_k ^ dp_k`.
    pub fn symplectic_at(&self, x: &[T]) -> Result<Matrix<T>> {
        self.per_pair(x, |q, p, l| {
            let c = symplectic_coefficient(q, p, l);
            [T::zero(), c, -c, T::zero()]
        })
    }

    /// Poisson bivector with `{q_k, p_k} = 1 / c_k`.
    pub fn poisson_at(&self, x: &[T]) -> Result<Matrix<T>> {
        self.per_pair(x, |q, p, l| {
            let c = T::one() / symplectic_coefficient(q, p, l);
            [T::zero(), c, -c, T::zero()]
        })
    }

    /// `{q_k, p_k}_lambda` for each pair.
    pub fn bracket_factor(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != 2 * self.n {
            return Err(Error::Dimension("point does not match the structure".into()));
        }
        Ok((0..self.n).map(|k| T::one() / symplectic_coefficient(x[k], x[self.n + k], self.lambda)).collect())
    }

    pub fn metric(&self) -> MetricField<T> {
        let s = *self;
        MetricField::new(self.dim(), move |x| s.metric_at(x))
    }

    pub fn symplectic(&self) -> TwoFormField<T> {
        let s = *self;
        TwoFormField::new(self.dim(), move |x| s.symplectic_at(x))
    }

    pub fn poisson(&self) -> Contravariant2Field<T> {
        let s = *self;
        Contravariant2Field::new(self.dim(), move |x| s.poisson_at(x))
    }

    pub fn inverse_metric(&self) -> Contravariant2Field<T> {
        let s = *self;
        Contravariant2Field::new(self.dim(), move |x| s.metric_at(x)?.inverse())
    }

    /// `J_lambda = (D phi)^{-1} J (D phi)`: the standard complex structure of
    /// the `(Q, P)` chart.
    pub fn complex_structure(&self) -> Tensor11Field<T> {
        let (n, l) = (self.n, self.lambda);
        let w = canonical_block::<T>(n);
        Tensor11Field::new(2 * n, move |x| {
            let m = lambda_chart_jacobian(x, l)?;
            Ok(&(&m.inverse()? * &w) * &m)
        })
    }

    /// `Delta_lambda = (D phi)^{-1} phi(x)`: the Liouville field of the
    /// `(Q, P)` linear structure.
    pub fn liouville(&self) -> VectorField<T> {
        let l = self.lambda;
        VectorField::new(self.dim(), move |x| lambda_chart_jacobian(x, l)?.inverse()?.mul_vec(&lambda_chart(x, l)?))
    }

    pub fn triple(&self) -> AdmissibleTriple<T> {
        AdmissibleTriple { g: self.metric(), omega: self.symplectic(), j: self.complex_structure() }
    }

    /// `{f, h}_lambda = grad f^T P_lambda grad h`.
    pub fn poisson_bracket(&self, f: &ScalarField<T>, h: &ScalarField<T>) -> ScalarField<T> {
        let (s, f, h) = (*self, f.clone(), h.clone());
        ScalarField::new(self.dim(), move |x| {
            let gf = gradient(|y| f.eval(y), x, T::lit(GRADIENT_STEP))?;
            let gh = gradient(|y| h.eval(y), x, T::lit(GRADIENT_STEP))?;
            let pg = s.poisson_at(x)?.mul_vec(&gh)?;
            Ok(gf.iter().zip(&pg).fold(T::zero(), |a, (&u, &v)| a + u * v))
        })
    }

    /// Closed forms against pullbacks through a finite-difference Jacobian of
    /// the chart (step `h`).
    pub fn pullback_defects(&self, x: &[T], h: T) -> Result<ChartDefects<T>> {
        let l = self.lambda;
        let m = jacobian_fd(|y| lambda_chart(y, l), x, h)?;
        let w = canonical_block::<T>(self.n);
        let g = &m.transpose() * &m;
        let om = &(&m.transpose() * &w) * &m;
        let mi = m.inverse()?;
        let p = &(&mi * &w) * &mi.transpose();
        Ok(ChartDefects {
            metric: g.max_abs_diff(&self.metric_at(x)?),
            symplectic: om.max_abs_diff(&self.symplectic_at(x)?),
            bracket: p.max_abs_diff(&self.poisson_at(x)?),
        })
    }
}

/// The (1,1)-tensor `T = sum (Q_k / q_k) dq_k (x) d/dq_k + (P_k / p_k) dp_k (x) d/dp_k`
/// relating the two linear structures. Singular on the coordinate axes.
pub fn linear_structure_map<T: Real>(n: usize, lambda: T) -> Result<Tensor11Field<T>> {
    check_lambda(lambda)?;
    Ok(Tensor11Field::new(2 * n, move |x: &[T]| {
        if x.iter().any(|v| v.is_zero()) {
            return Err(Error::Domain("structure map is singular on the coordinate axes".into()));
        }
        let y = lambda_chart(x, lambda)?;
        Ok(Matrix::from_real_diagonal(&x.iter().zip(&y).map(|(&a, &b)| b / a).collect::<Vec<_>>()))
    }))
}

/// `max |T(Delta(q, p)) - Delta(Q, P)|` at `x`, where `Delta(Q, P)` at the
/// image point has components `(Q, P)`.
pub fn structure_map_defect<T: Real>(x: &[T], lambda: T) -> Result<T> {
    let t = linear_structure_map(x.len() / 2, lambda)?;
    let pushed = t.eval(x)?.mul_vec(x)?;
    let target = lambda_chart(x, lambda)?;
    Ok(pushed.iter().zip(&target).fold(T::zero(), |a, (&u, &v)| a.max((u - v).abs())))
}
