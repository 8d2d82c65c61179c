//! Quadratic functions of a two-level system on its realification `R^4`
//! and their Hermitian bracket `[f, h] = (f, h)_g + i {f, h}_omega`.
//!
//! A complex matrix `M = R + i S` acting on `(q_1 + i p_1, q_2 + i p_2)` is
//! realified as `[[R, -S], [S, R]]` in the ordering `(q_1, q_2, p_1, p_2)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::fields::{
    canonical_block, complex_gradient, constant_contravariant, constant_covariant, ComplexScalarField,
    Contravariant2Field, MetricField, TwoFormField, GRADIENT_STEP,
};
use super::structures::DeformedStructures;
use crate::qalg::Matrix;
use crate::scalar::Real;
use crate::{Error, Result};

/// `sigma_0 = I`, `sigma_1`, `sigma_2`, `sigma_3`.
pub fn pauli<T: Real>(k: usize) -> Result<Matrix<Complex<T>>> {
    let (o, z, i) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::one()));
    let rows = match k {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, -i], [i, z]],
        3 => [[o, z], [z, -o]],
        _ => return Err(Error::Validation(format!("no Pauli matrix with index {k}"))),
    };
    Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect())
}

/// `[[R, -S], [S, R]]` for `M = R + i S`.
pub fn realify_complex<T: Real>(m: &Matrix<Complex<T>>) -> Matrix<T> {
    let (r, c) = m.shape();
    Matrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Realified Pauli matrix.
pub fn real_pauli<T: Real>(k: usize) -> Result<Matrix<T>> {
    Ok(realify_complex(&pauli::<T>(k)?))
}

/// `f_A(x) = 1/2 x^T A (G(x) + i Omega(x)) x`.
pub fn quadratic_function<T: Real>(a: &Matrix<T>, g: &MetricField<T>, omega: &TwoFormField<T>) -> Result<ComplexScalarField<T>> {
    let d = g.dim();
    if a.shape() != (d, d) || omega.dim() != d {
        return Err(Error::Dimension("operator, metric and form must share the dimension".into()));
    }
    let (a, g, omega) = (a.clone(), g.clone(), omega.clone());
    Ok(ComplexScalarField::new(d, move |x| {
        let gx = g.eval(x)?.mul_vec(x)?;
        let wx = omega.eval(x)?.mul_vec(x)?;
        let agx = a.mul_vec(&gx)?;
        let awx = a.mul_vec(&wx)?;
        let dot = |u: &[T]| x.iter().zip(u).fold(T::zero(), |s, (&p, &q)| s + p * q);
        let half = T::lit(0.5);
        Ok(Complex::new(half * dot(&agx), half * dot(&awx)))
    }))
}

/// Contravariant data for the bracket: inverse metric and Poisson bivector.
#[derive(Debug, Clone)]
pub struct BracketContext<T> {
    pub inverse_metric: Contravariant2Field<T>,
    pub poisson: Contravariant2Field<T>,
}

impl<T: Real> BracketContext<T> {
    /// Flat Darboux structures on `R^2n`.
    pub fn darboux(n: usize) -> Self {
        BracketContext {
            inverse_metric: constant_contravariant(Matrix::identity(2 * n)),
            poisson: constant_contravariant(canonical_block(n)),
        }
    }

    /// The lambda-deformed structures written in `(q, p)`.
    pub fn deformed(d: &DeformedStructures<T>) -> Self {
        BracketContext { inverse_metric: d.inverse_metric(), poisson: d.poisson() }
    }
}

/// `[f, h] = grad f^T g^{-1} grad h + i grad f^T P grad h`, bilinear in the
/// complex values, gradients by central differences.
pub fn hermitian_bracket<T: Real>(f: &ComplexScalarField<T>, h: &ComplexScalarField<T>, ctx: &BracketContext<T>) -> Result<ComplexScalarField<T>> {
    if f.dim() != h.dim() || f.dim() != ctx.poisson.dim() {
        return Err(Error::Dimension("functions and structures on different spaces".into()));
    }
    let (f, h, ctx) = (f.clone(), h.clone(), ctx.clone());
    Ok(ComplexScalarField::new(f.dim(), move |x| {
        let step = T::lit(GRADIENT_STEP);
        let gf = complex_gradient(|y| f.eval(y), x, step)?;
        let gh = complex_gradient(|y| h.eval(y), x, step)?;
        let form = |m: &Matrix<T>| {
            let mut s = Complex::new(T::zero(), T::zero());
            for i in 0..gf.len() {
                for j in 0..gh.len() {
                    s += gf[i] * gh[j] * m[(i, j)];
                }
            }
            s
        };
        let sym = form(&ctx.inverse_metric.eval(x)?);
        let anti = form(&ctx.poisson.eval(x)?);
        Ok(sym + anti * Complex::new(T::zero(), T::one()))
    }))
}

/// `f_A` on the flat two-level realification.
pub fn darboux_quadratic<T: Real>(a: &Matrix<T>) -> Result<ComplexScalarField<T>> {
    quadratic_function(a, &constant_covariant(Matrix::identity(4)), &constant_covariant(canonical_block(2)))
}

/// `[f_{sigma_0}, f_{sigma_3}]` against `f_{2 sigma_0 sigma_3}` with flat and
/// with lambda-deformed brackets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketComparison<T> {
    pub points: usize,
    pub lambda: T,
    pub darboux_max_defect: T,
    pub deformed_max_defect: T,
}

pub fn bracket_comparison<T: Real>(points: &[Vec<T>], lambda: T) -> Result<BracketComparison<T>> {
    let s0 = real_pauli::<T>(0)?;
    let s3 = real_pauli::<T>(3)?;
    let f0 = darboux_quadratic(&s0)?;
    let f3 = darboux_quadratic(&s3)?;
    let target = darboux_quadratic(&(&s0 * &s3).scale(T::lit(2.0)))?;
    let flat = hermitian_bracket(&f0, &f3, &BracketContext::darboux(2))?;
    let deformed = super::structures::deformed_structures(2, lambda)?;
    let bent = hermitian_bracket(&f0, &f3, &BracketContext::deformed(&deformed))?;
    let mut out = BracketComparison { points: points.len(), lambda, darboux_max_defect: T::zero(), deformed_max_defect: T::zero() };
    for x in points {
        let t = target.eval(x)?;
        out.darboux_max_defect = out.darboux_max_defect.max((flat.eval(x)? - t).norm());
        out.deformed_max_defect = out.deformed_max_defect.max((bent.eval(x)? - t).norm());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    #[test]
    fn multiplication_by_i_is_minus_the_complex_structure() {
        let i = Matrix::from_diagonal(&[Complex::new(0.0f64, 1.0); 2]);
        let r = realify_complex(&i);
        assert_eq!(r, canonical_block::<f64>(2).scale(-1.0));
    }

    #[test]
    fn paper_quadratic_functions() {
        let f0 = darboux_quadratic(&real_pauli::<f64>(0).unwrap()).unwrap();
        let f3 = darboux_quadratic(&real_pauli::<f64>(3).unwrap()).unwrap();
        assert_eq!(f0.eval(&[1.0, 0.0, 0.0, 0.0]).unwrap(), Complex::new(0.5, 0.0));
        assert_eq!(f3.eval(&[1.0, 0.0, 0.0, 0.0]).unwrap(), Complex::new(0.5, 0.0));
        // Q_2 = 1 in (q_1, q_2, p_1, p_2)
        assert_eq!(f3.eval(&[0.0, 1.0, 0.0, 0.0]).unwrap(), Complex::new(-0.5, 0.0));
        let two = darboux_quadratic(&real_pauli::<f64>(3).unwrap().scale(2.0)).unwrap();
        let mut rng = random::rng_from_seed(9);
        for _ in 0..20 {
            let x = random::vector::<f64>(&mut rng, 4);
            assert!((two.eval(&x).unwrap() - f3.eval(&x).unwrap() * 2.0).norm() < 1e-14);
        }
    }

    #[test]
    fn bracket_of_sigma0_sigma3() {
        let f0 = darboux_quadratic(&real_pauli::<f64>(0).unwrap()).unwrap();
        let f3 = darboux_quadratic(&real_pauli::<f64>(3).unwrap()).unwrap();
        let b = hermitian_bracket(&f0, &f3, &BracketContext::darboux(2)).unwrap();
        assert!((b.eval(&[1.0, 0.0, 0.0, 0.0]).unwrap() - Complex::new(1.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn bracket_parts_have_their_symmetry() {
        let mut rng = random::rng_from_seed(10);
        let ctx = BracketContext::darboux(2);
        let real = |m: Matrix<f64>| ComplexScalarField::new(4, move |x: &[f64]| {
            let mx = m.mul_vec(x)?;
            Ok(Complex::new(x.iter().zip(&mx).map(|(a, b)| a * b).sum::<f64>(), 0.0))
        });
        let a = real(random::matrix(&mut rng, 4, 4));
        let b = real(random::matrix(&mut rng, 4, 4));
        let ab = hermitian_bracket(&a, &b, &ctx).unwrap();
        let ba = hermitian_bracket(&b, &a, &ctx).unwrap();
        let aa = hermitian_bracket(&a, &a, &ctx).unwrap();
        for _ in 0..10 {
            let x = random::vector::<f64>(&mut rng, 4);
            let (u, v) = (ab.eval(&x).unwrap(), ba.eval(&x).unwrap());
            assert!((u.re - v.re).abs() < 1e-12 && (u.im + v.im).abs() < 1e-12, "{u} {v}");
            assert!(aa.eval(&x).unwrap().im.abs() < 1e-12);
        }
    }

    #[test]
    fn deformation_breaks_the_identity() {
        let mut rng = random::rng_from_seed(11);
        let pts: Vec<Vec<f64>> = (0..20).map(|_| random::vector(&mut rng, 4)).collect();
        let c = bracket_comparison(&pts, 0.1).unwrap();
        assert!(c.darboux_max_defect < 1e-6 && c.deformed_max_defect > 1e-3, "{c:?}");
    }
}
