//! Seeded generators for the randomized checks.
//!
//! Everything draws from a [`ChaCha8Rng`], so a seed fixes every trial on
//! every platform.

use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qalg::{inner, vec_mul_right, vec_norm, vec_sub, Matrix};
use crate::scalar::{Real, Scalar};

pub type TrialRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on `[-1, 1]`.
pub fn real<T: Real>(rng: &mut TrialRng) -> T {
    T::lit(rng.gen_range(-1.0..=1.0))
}

/// Uniform on `[lo, hi]`.
pub fn real_in<T: Real>(rng: &mut TrialRng, lo: f64, hi: f64) -> T {
    T::lit(rng.gen_range(lo..=hi))
}

/// Every real component uniform on `[-1, 1]`.
pub fn scalar<S: Scalar>(rng: &mut TrialRng) -> S {
    let c: Vec<S::Real> = (0..S::REAL_DIM).map(|_| real(rng)).collect();
    S::from_components(&c)
}

/// Like [`scalar`] but bounded away from zero (`|s| >= 0.1`).
pub fn nonzero_scalar<S: Scalar>(rng: &mut TrialRng) -> S {
    loop {
        let s: S = scalar(rng);
        if s.modulus() >= S::Real::lit(0.1) {
            return s;
        }
    }
}

pub fn vector<S: Scalar>(rng: &mut TrialRng, n: usize) -> Vec<S> {
    (0..n).map(|_| scalar(rng)).collect()
}

pub fn matrix<S: Scalar>(rng: &mut TrialRng, rows: usize, cols: usize) -> Matrix<S> {
    Matrix::from_fn(rows, cols, |_, _| scalar(rng))
}

/// `(A + A^dagger) / 2` for a random `A`.
pub fn hermitian<S: Scalar>(rng: &mut TrialRng, n: usize) -> Matrix<S> {
    let a = matrix::<S>(rng, n, n);
    (&a + &a.adjoint()).scale(S::Real::lit(0.5))
}

/// `I + s A` with `|s A|` small enough to stay invertible in practice;
/// callers that need a guarantee check the inverse.
pub fn near_identity<S: Scalar>(rng: &mut TrialRng, n: usize, s: f64) -> Matrix<S> {
    &Matrix::identity(n) + &matrix::<S>(rng, n, n).scale(S::Real::lit(s))
}

/// Haar-like unitary from Gram-Schmidt (right scalars) on random columns.
pub fn unitary<S: Scalar>(rng: &mut TrialRng, n: usize) -> Matrix<S> {
    let mut cols: Vec<Vec<S>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = vector::<S>(rng, n);
        for u in &cols {
            v = vec_sub(&v, &vec_mul_right(u, inner(u, &v)));
        }
        let nv = vec_norm(&v);
        if nv > S::Real::lit(1e-3) {
            cols.push(v.iter().map(|x| x.scale(S::Real::one() / nv)).collect());
        }
    }
    Matrix::from_columns(&cols).expect("square")
}

/// Positive spectrum in `[0.5, 3]`. Distinct values keep a relative gap of
/// at least `0.05`; a degenerate spectrum repeats at least one value.
pub fn spectrum<T: Real>(rng: &mut TrialRng, n: usize, degenerate: bool) -> Vec<T> {
    let distinct = loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..=3.0)).collect();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        if v.windows(2).all(|w| w[1] - w[0] >= 0.05 * 3.0) {
            break v;
        }
    };
    let mut out = distinct;
    if degenerate && n >= 2 {
        let repeats = rng.gen_range(1..n);
        for _ in 0..repeats {
            let from = rng.gen_range(0..n);
            let to = rng.gen_range(0..n);
            out[to] = out[from];
        }
        if out.iter().all(|x| out.iter().filter(|y| *y == x).count() == 1) {
            out[1] = out[0];
        }
        out.shuffle(rng);
    }
    out.into_iter().map(T::lit).collect()
}

/// A pair of positive Gram matrices `(H1, H2) = (C^dagger C, C^dagger W L W^dagger C)`
/// whose connecting operator is similar to `diag(spectrum)`.
pub fn hermitian_pair<S: Scalar>(
    rng: &mut TrialRng,
    spectrum: &[S::Real],
) -> (Matrix<S>, Matrix<S>) {
    let n = spectrum.len();
    let c = loop {
        let c = near_identity::<S>(rng, n, 0.3);
        if c.inverse().is_ok() {
            break c;
        }
    };
    let w = unitary::<S>(rng, n);
    let l = Matrix::<S>::from_real_diagonal(spectrum);
    let h1 = &c.adjoint() * &c;
    let inner = &(&w * &l) * &w.adjoint();
    let h2 = &(&c.adjoint() * &inner) * &c;
    (symmetrize(&h1), symmetrize(&h2))
}

fn symmetrize<S: Scalar>(m: &Matrix<S>) -> Matrix<S> {
    (m + &m.adjoint()).scale(S::Real::lit(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalg::Quaternion;

    #[test]
    fn seeded_streams_repeat() {
        let a: Vec<f64> = {
            let mut r = rng_from_seed(7);
            (0..5).map(|_| real(&mut r)).collect()
        };
        let b: Vec<f64> = {
            let mut r = rng_from_seed(7);
            (0..5).map(|_| real(&mut r)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn unitary_is_unitary() {
        let mut r = rng_from_seed(1);
        let u = unitary::<Quaternion<f64>>(&mut r, 3);
        assert!((&u.adjoint() * &u).max_abs_diff(&Matrix::identity(3)) < 1e-12);
    }

    #[test]
    fn degenerate_spectrum_repeats() {
        let mut r = rng_from_seed(3);
        for n in 2..6 {
            let s: Vec<f64> = spectrum(&mut r, n, true);
            let mut t = s.clone();
            t.sort_by(|a, b| a.partial_cmp(b).unwrap());
            t.dedup();
            assert!(t.len() < n);
        }
    }
}
