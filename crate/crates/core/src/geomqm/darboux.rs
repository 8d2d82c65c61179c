//! Darboux charts for the invariant forms `omega_F = F(H_s) dq ^ dp`.
//!
//! The chart `(Q, P) = (q, p)(1 + f(H_s))` is Darboux for `omega_F` when
//! `d/ds [s (1 + f(s))^2] = F(s)`, solved here by quadrature.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::{Error, Result};

/// Relative accuracy requested from the quadrature.
pub const QUADRATURE_REL_TOL: f64 = 1e-12;
const MAX_DEPTH: usize = 48;

/// Adaptive Simpson on `[a, b]` with Richardson correction; `tol` is absolute.
pub fn adaptive_simpson<T: Real>(f: &impl Fn(T) -> Result<T>, a: T, b: T, tol: T) -> Result<T> {
    let half = T::lit(0.5);
    let m = (a + b) * half;
    let (fa, fm, fb) = (f(a)?, f(m)?, f(b)?);
    let whole = simpson(a, b, fa, fm, fb);
    refine(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<T: Real>(f: &impl Fn(T) -> Result<T>, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: usize) -> Result<T> {
    let half = T::lit(0.5);
    let m = (a + b) * half;
    let (lm, rm) = ((a + m) * half, (m + b) * half);
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= T::lit(15.0) * tol {
        return Ok(left + right + delta / T::lit(15.0));
    }
    Ok(refine(f, a, m, fa, flm, fm, left, tol * half, depth - 1)? + refine(f, m, b, fm, frm, fb, right, tol * half, depth - 1)?)
}

/// Named densities `F` for the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `F = 1`.
    Identity,
    /// `F(s) = (1 + lambda s)(1 + 3 lambda s)`, the oscillator deformation.
    Lambda(f64),
    /// `F(s) = sum c_i s^i`.
    Polynomial(Vec<f64>),
}

impl Family {
    pub fn density<T: Real>(&self, s: T) -> T {
        match self {
            Family::Identity => T::one(),
            Family::Lambda(l) => {
                let l = T::lit(*l);
                (T::one() + l * s) * (T::one() + T::lit(3.0) * l * s)
            }
            Family::Polynomial(c) => c.iter().rev().fold(T::zero(), |acc, &ci| acc * s + T::lit(ci)),
        }
    }

    /// Closed-form `f` when one is known.
    pub fn exact<T: Real>(&self, s: T) -> Option<T> {
        match self {
            Family::Identity => Some(T::zero()),
            Family::Lambda(l) => Some(T::lit(*l) * s),
            Family::Polynomial(_) => None,
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// `identity`, `lambda:<x>` or comma-separated coefficients `c0,c1,...`.
    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "identity" {
            return Ok(Family::Identity);
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("bad number '{s}' in family '{text}'")))
        };
        if let Some(rest) = t.strip_prefix("lambda:") {
            let l = num(rest)?;
            if l < 0.0 {
                return Err(Error::Domain("lambda must be non-negative".into()));
            }
            return Ok(Family::Lambda(l));
        }
        let coeffs = t.split(',').map(num).collect::<Result<Vec<_>>>()?;
        Ok(Family::Polynomial(coeffs))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Identity => write!(f, "identity"),
            Family::Lambda(l) => write!(f, "lambda:{l}"),
            Family::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

/// `f` for a positive density `F`.
#[derive(Clone)]
pub struct DarbouxFunction<T> {
    density: Arc<dyn Fn(T) -> T + Send + Sync>,
}

impl<T> fmt::Debug for DarbouxFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DarbouxFunction")
    }
}

pub fn darboux_for_family<T: Real>(density: impl Fn(T) -> T + Send + Sync + 'static) -> DarbouxFunction<T> {
    DarbouxFunction { density: Arc::new(density) }
}

impl<T: Real> DarbouxFunction<T> {
    fn positive_density(&self, u: T) -> Result<T> {
        let v = (self.density)(u);
        if !(v > T::zero()) {
            return Err(Error::Domain(format!("density must be positive, F({u}) = {v}")));
        }
        Ok(v)
    }

    /// `int_0^s F`.
    pub fn integral(&self, s: T) -> Result<T> {
        if !(s >= T::zero()) {
            return Err(Error::Domain(format!("argument must be non-negative, got {s}")));
        }
        if s.is_zero() {
            self.positive_density(s)?;
            return Ok(T::zero());
        }
        let f = |u: T| self.positive_density(u);
        // scale of the integral from a coarse Simpson pass
        let scale = s * (f(T::zero())? + T::lit(4.0) * f(s * T::lit(0.5))? + f(s)?) / T::lit(6.0);
        let tol = scale.abs().max(T::min_positive_value()) * T::lit(QUADRATURE_REL_TOL).max(T::epsilon());
        adaptive_simpson(&f, T::zero(), s, tol)
    }

    /// `f(s) = sqrt(int_0^s F / s) - 1`, with `f(0) = sqrt(F(0)) - 1`.
    pub fn eval(&self, s: T) -> Result<T> {
        if s.is_zero() {
            return Ok(self.positive_density(s)?.sqrt() - T::one());
        }
        Ok((self.integral(s)? / s).sqrt() - T::one())
    }

    /// `|d/ds [s (1 + f)^2] - F(s)|` by central differences of step `h`
    /// (one-sided when `s < h`).
    pub fn ode_residual(&self, s: T, h: T) -> Result<T> {
        let phi = |u: T| -> Result<T> {
            let v = T::one() + self.eval(u)?;
            Ok(u * v * v)
        };
        let d = if s >= h { (phi(s + h)? - phi(s - h)?) / (h + h) } else { (phi(s + h)? - phi(s)?) / h };
        Ok((d - self.positive_density(s)?).abs())
    }

    /// `count` evenly spaced samples `(s, f(s))` on `[0, s_max]`.
    pub fn sample(&self, s_max: T, count: usize) -> Result<Vec<(T, T)>> {
        if count < 2 {
            return Err(Error::Validation("need at least two samples".into()));
        }
        let step = s_max / T::from_usize_lossy(count - 1);
        (0..count)
            .map(|i| {
                let s = step * T::from_usize_lossy(i);
                Ok((s, self.eval(s)?))
            })
            .collect()
    }
}

impl Family {
    pub fn solution<T: Real>(&self) -> DarbouxFunction<T> {
        let fam = self.clone();
        darboux_for_family(move |s| fam.density(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_smooth_functions() {
        let v = adaptive_simpson(&|x: f64| Ok(x.sin()), 0.0, std::f64::consts::PI, 1e-13).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn undeformed_family_is_zero() {
        let d = darboux_for_family(|_s: f64| 1.0);
        for s in [0.0, 0.5, 3.0] {
            assert!(d.eval(s).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn oscillator_family_recovers_linear_f() {
        let d = Family::Lambda(0.5).solution::<f64>();
        for i in 0..=40 {
            let s = 0.1 * i as f64;
            assert!((d.eval(s).unwrap() - 0.5 * s).abs() < 1e-8);
        }
        assert!(d.ode_residual(1.3, 1e-4).unwrap() < 1e-6);
    }

    #[test]
    fn radical_family() {
        let d = darboux_for_family(|s: f64| 1.0 + 2.0 * s);
        for s in [0.0, 0.25, 1.0, 4.0] {
            assert!((d.eval(s).unwrap() - ((1.0 + s).sqrt() - 1.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn non_positive_density_is_rejected() {
        let d = darboux_for_family(|s: f64| 1.0 - s);
        assert!(matches!(d.eval(2.0), Err(Error::Domain(_))));
        assert!(matches!(d.eval(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn family_parsing_round_trips() {
        for text in ["identity", "lambda:0.25", "1,2,0.5"] {
            let f: Family = text.parse().unwrap();
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("lambda:x".parse::<Family>().is_err());
        assert!("".parse::<Family>().is_err());
    }
}
