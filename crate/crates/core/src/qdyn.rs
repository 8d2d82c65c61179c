//! Driven two-level system read in a complex and in a right quaternionic
//! Hilbert space.
//!
//! The propagator keeps the Cayley-Klein shape `[[conj F, L], [-conj L, F]]`.
//! Quaternionically it commutes with every `G = [[a, j z], [-j z, a]]`,
//! `a > |z|`, which defines a second Hermitian structure.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::qalg::{complex_to_quaternionic, quat_hermitian_eig, Matrix, Quaternion};
use crate::scalar::Real;
use crate::{Error, Result};

/// Default integration step.
pub const DEFAULT_DT: f64 = 1e-4;
/// Largest Cayley-Klein defect tolerated before integration is aborted.
pub const CK_ABORT: f64 = 1e-6;

type C<T> = Complex<T>;

fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

fn cmat<T: Real>(rows: [[C<T>; 2]; 2]) -> Matrix<C<T>> {
    Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).expect("2x2")
}

/// `J_1 = (i/2) sigma_x`, `J_2 = (i/2) sigma_y`, `J_3 = (i/2) sigma_z`, so
/// `[J_l, J_m] = -eps_lmn J_n`.
pub fn su2_generators<T: Real>() -> [Matrix<C<T>>; 3] {
    let h = T::lit(0.5);
    let z = C::new(T::zero(), T::zero());
    [
        cmat([[z, c(T::zero(), h)], [c(T::zero(), h), z]]),
        cmat([[z, c(h, T::zero())], [c(-h, T::zero()), z]]),
        cmat([[c(T::zero(), h), z], [z, c(T::zero(), -h)]]),
    ]
}

/// Time-dependent detuning `omega(t)` and coupling `Omega(t) = Omega_0 + i Omega_1`.
#[derive(Clone)]
pub struct TwoLevelHamiltonian<T> {
    drive: Arc<dyn Fn(T) -> (T, T, T) + Send + Sync>,
}

impl<T> fmt::Debug for TwoLevelHamiltonian<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TwoLevelHamiltonian")
    }
}

/// One row of a piecewise-constant drive: values hold from `start` until
/// the next row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSegment {
    pub start: f64,
    pub omega: f64,
    #[serde(rename = "Omega0")]
    pub omega0: f64,
    #[serde(rename = "Omega1")]
    pub omega1: f64,
}

impl<T: Real> TwoLevelHamiltonian<T> {
    /// From a closure returning `(omega, Omega_0, Omega_1)` at time `t`.
    pub fn new(drive: impl Fn(T) -> (T, T, T) + Send + Sync + 'static) -> Self {
        TwoLevelHamiltonian { drive: Arc::new(drive) }
    }

    pub fn from_fns(
        omega: impl Fn(T) -> T + Send + Sync + 'static,
        omega0: impl Fn(T) -> T + Send + Sync + 'static,
        omega1: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self::new(move |t| (omega(t), omega0(t), omega1(t)))
    }

    pub fn constant(omega: T, omega0: T, omega1: T) -> Self {
        Self::new(move |_| (omega, omega0, omega1))
    }

    /// Piecewise-constant drive; before the first segment the first row applies.
    pub fn piecewise(segments: Vec<DriveSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Validation("empty drive table".into()));
        }
        if segments.windows(2).any(|w| !(w[1].start > w[0].start)) {
            return Err(Error::Validation("drive table times must increase".into()));
        }
        if segments.iter().any(|s| ![s.start, s.omega, s.omega0, s.omega1].iter().all(|v| v.is_finite())) {
            return Err(Error::Validation("drive table has non-finite entries".into()));
        }
        Ok(Self::new(move |t: T| {
            let tf = t.as_f64();
            let idx = segments.partition_point(|s| s.start <= tf).saturating_sub(1);
            let s = segments[idx];
            (T::lit(s.omega), T::lit(s.omega0), T::lit(s.omega1))
        }))
    }

    /// `(omega, Omega_0, Omega_1)` at `t`.
    pub fn drive(&self, t: T) -> (T, T, T) {
        (self.drive)(t)
    }
}

/// `H~(t) = i [[omega/2, conj Omega], [Omega, -omega/2]]`.
pub fn hamiltonian_matrix<T: Real>(h: &TwoLevelHamiltonian<T>, t: T) -> Matrix<C<T>> {
    let (w, o0, o1) = h.drive(t);
    let i = c(T::zero(), T::one());
    let half = T::lit(0.5);
    cmat([
        [i * c(w * half, T::zero()), i * c(o0, -o1)],
        [i * c(o0, o1), i * c(-w * half, T::zero())],
    ])
}

/// Propagator at time `t` with `F = U_22`, `L = U_12`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CKState<T> {
    pub t: T,
    pub u: [[C<T>; 2]; 2],
    pub f: C<T>,
    pub l: C<T>,
}

impl<T: Real> CKState<T> {
    pub fn from_unitary(t: T, u: &Matrix<C<T>>) -> Self {
        let a = [[u[(0, 0)], u[(0, 1)]], [u[(1, 0)], u[(1, 1)]]];
        CKState { t, u: a, f: a[1][1], l: a[0][1] }
    }

    pub fn matrix(&self) -> Matrix<C<T>> {
        cmat(self.u)
    }

    /// `max(|U_11 - conj U_22|, |U_12 + conj U_21|)`.
    pub fn ck_defect(&self) -> T {
        let u = self.u;
        (u[0][0] - u[1][1].conj()).norm().max((u[0][1] + u[1][0].conj()).norm())
    }

    /// `| |F|^2 + |L|^2 - 1 |`.
    pub fn norm_defect(&self) -> T {
        (self.f.norm_sqr() + self.l.norm_sqr() - T::one()).abs()
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> T {
        let u = self.matrix();
        (&u.adjoint() * &u).max_abs_diff(&Matrix::identity(2))
    }
}

/// Nearest unitary to a 2x2 matrix (polar factor), closed form.
pub fn polar_unitary<T: Real>(m: &Matrix<C<T>>) -> Result<Matrix<C<T>>> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let ad = det.norm();
    if ad <= T::min_positive_value() {
        return Err(Error::Singular);
    }
    // |det| (M^{-1})^dagger = (det / |det|) * cof(M)
    let phase = det / c(ad, T::zero());
    let cof = cmat([[m[(1, 1)], -m[(1, 0)]], [-m[(0, 1)], m[(0, 0)]]]).map(|z| z.conj());
    let sum = m + &cof.map(|z| z * phase);
    let norm = (m.frobenius_norm().powi(2) + ad + ad).sqrt();
    Ok(sum.scale(T::one() / norm))
}

/// Trajectory from [`evolve`] with its worst defects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub states: Vec<CKState<T>>,
    pub max_unitarity_defect: T,
    pub max_ck_defect: T,
    pub max_norm_defect: T,
}

/// Integrates `dU/dt = -H~(t) U`, `U(0) = I`, with RK4 steps of at most `dt`,
/// projecting onto the unitary group after each step.
pub fn evolve<T: Real>(h: &TwoLevelHamiltonian<T>, total: T, dt: T) -> Result<Trajectory<T>> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::Validation(format!("time step must be positive, got {dt}")));
    }
    if !(total >= T::zero()) || !total.is_finite() {
        return Err(Error::Validation(format!("final time must be non-negative, got {total}")));
    }
    let steps = (total / dt - T::lit(1e-9)).ceil().max(T::zero()).to_usize().unwrap_or(0);
    let step = if steps == 0 { T::zero() } else { total / T::from_usize_lossy(steps) };
    let mut u = Matrix::<C<T>>::identity(2);
    let mut states = Vec::with_capacity(steps + 1);
    states.push(CKState::from_unitary(T::zero(), &u));
    let rhs = |t: T, u: &Matrix<C<T>>| (&hamiltonian_matrix(h, t) * u).scale(-T::one());
    let half = T::lit(0.5);
    let ck_abort = T::lit(CK_ABORT);
    for s in 0..steps {
        let t = step * T::from_usize_lossy(s);
        let k1 = rhs(t, &u);
        let k2 = rhs(t + step * half, &(&u + &k1.scale(step * half)));
        let k3 = rhs(t + step * half, &(&u + &k2.scale(step * half)));
        let k4 = rhs(t + step, &(&u + &k3.scale(step)));
        let incr = &(&(&k1 + &k2.scale(T::lit(2.0))) + &k3.scale(T::lit(2.0))) + &k4;
        u = polar_unitary(&(&u + &incr.scale(step / T::lit(6.0))))?;
        let state = CKState::from_unitary(step * T::from_usize_lossy(s + 1), &u);
        if state.ck_defect() > ck_abort {
            return Err(Error::Numeric(format!("Cayley-Klein shape lost at t = {}", state.t)));
        }
        states.push(state);
    }
    let fold = |f: fn(&CKState<T>) -> T| states.iter().map(f).fold(T::zero(), T::max);
    Ok(Trajectory {
        max_unitarity_defect: fold(CKState::unitarity_defect),
        max_ck_defect: fold(CKState::ck_defect),
        max_norm_defect: fold(CKState::norm_defect),
        states,
    })
}

/// `exp(-i H t)` for constant `H = [[omega/2, conj Omega], [Omega, -omega/2]]`:
/// `cos(E t) I - i sin(E t) / E H`, `E = sqrt(omega^2/4 + |Omega|^2)`.
pub fn constant_oracle<T: Real>(omega: T, coupling: C<T>, t: T) -> Matrix<C<T>> {
    let half = T::lit(0.5);
    let h = cmat([[c(omega * half, T::zero()), coupling.conj()], [coupling, c(-omega * half, T::zero())]]);
    let e = (omega * omega * half * half + coupling.norm_sqr()).sqrt();
    let (cos, sinc) = if e.is_zero() { (T::one(), t) } else { ((e * t).cos(), (e * t).sin() / e) };
    let id = Matrix::<C<T>>::identity(2).scale(cos);
    &id + &h.map(|z| z * c(T::zero(), -sinc))
}

/// Parameters of `G = [[a, j z], [-j z, a]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutantG<T> {
    pub a: T,
    pub z: C<T>,
}

impl<T: Real> CommutantG<T> {
    pub fn new(a: T, z: C<T>) -> Result<Self> {
        if !(a > z.norm()) {
            return Err(Error::Validation(format!("positivity needs a > |z|, got a = {a}, |z| = {}", z.norm())));
        }
        Ok(CommutantG { a, z })
    }

    pub fn matrix(&self) -> Matrix<Quaternion<T>> {
        let jz = Quaternion::j() * Quaternion::from_complex(self.z);
        let a = Quaternion::new(self.a, T::zero(), T::zero(), T::zero());
        Matrix::from_rows(vec![vec![a, jz], vec![-jz, a]]).expect("2x2")
    }

    /// `a -+ |z|`, ascending.
    pub fn eigenvalues(&self) -> [T; 2] {
        [self.a - self.z.norm(), self.a + self.z.norm()]
    }

    /// Spectrum from the quaternionic eigensolver.
    pub fn computed_eigenvalues(&self) -> Result<Vec<T>> {
        Ok(quat_hermitian_eig(&self.matrix(), T::lit(1e-12))?.eigenvalues)
    }
}

pub fn commutant_matrix<T: Real>(a: T, z: C<T>) -> Result<Matrix<Quaternion<T>>> {
    Ok(CommutantG::new(a, z)?.matrix())
}

/// `max |U^dagger G U - G|` with `U` embedded entrywise.
pub fn check_biunitary<T: Real>(u: &Matrix<C<T>>, g: &Matrix<Quaternion<T>>) -> Result<T> {
    let q = complex_to_quaternionic(u);
    Ok((&(&q.adjoint() * g) * &q).max_abs_diff(g))
}

/// `P = |<-|U|+>|^2 = |L|^2` and `P' = |<-|G U|+>|^2 / (<-|G|-> <+|G|+>)`.
pub fn transition_probabilities<T: Real>(state: &CKState<T>, g: &CommutantG<T>) -> (T, T) {
    let gm = g.matrix();
    let u = complex_to_quaternionic(&state.matrix());
    let gu = &gm * &u;
    let amp = gu[(1, 0)];
    let p_prime = amp.norm_sqr() / (gm[(1, 1)].w * gm[(0, 0)].w);
    (state.l.norm_sqr(), p_prime)
}

/// `D = 1/2 [[1 + i, j - k], [1 - i, j + k]]`.
pub fn d_matrix<T: Real>() -> Matrix<Quaternion<T>> {
    let h = T::lit(0.5);
    let (o, z) = (T::one(), T::zero());
    let q = |w, x, y, k| Quaternion::new(w, x, y, k).scale(h);
    Matrix::from_rows(vec![vec![q(o, o, z, z), q(z, z, o, -o)], vec![q(o, -o, z, z), q(z, z, o, o)]]).expect("2x2")
}

/// `D (u I)` with `conj(u)^2 = i |z| / z`: rotates `z` onto `i |z|` first, so
/// that `G` becomes `diag(a + |z|, a - |z|)` for every `z`.
pub fn diagonalizer_for<T: Real>(z: C<T>) -> Matrix<Quaternion<T>> {
    let d = d_matrix::<T>();
    if z.norm().is_zero() {
        return d;
    }
    let target = c(T::zero(), z.norm()) / z;
    let u = Quaternion::from_complex(target.sqrt().conj());
    d.mul_scalar_right(u)
}

/// Conjugations by `D` and their defects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalizationReport<T> {
    /// `max |D D^dagger - I|`.
    pub unitarity: T,
    /// `max |D J_a D^dagger - diag(e_a, e_a)|` for `e = (i, j, k)`.
    pub generators: [T; 3],
    /// `max |D G D^dagger - diag(a + |z|, a - |z|)|`.
    pub commutant: T,
    /// Same with [`diagonalizer_for`].
    pub commutant_rotated: T,
    /// `max |D U D^dagger - diag(q, q)|`, `q = conj F - j conj L`, over the states.
    pub evolution: T,
    /// Largest off-diagonal entry of `D U D^dagger` over the states.
    pub evolution_off_diagonal: T,
}

fn quaternion_diag<T: Real>(a: Quaternion<T>, b: Quaternion<T>) -> Matrix<Quaternion<T>> {
    Matrix::from_diagonal(&[a, b])
}

fn conjugate<T: Real>(d: &Matrix<Quaternion<T>>, m: &Matrix<Quaternion<T>>) -> Matrix<Quaternion<T>> {
    &(d * m) * &d.adjoint()
}

pub fn diagonalize_d<T: Real>(g: &CommutantG<T>, states: &[CKState<T>]) -> DiagonalizationReport<T> {
    let d = d_matrix::<T>();
    let units = [Quaternion::i(), Quaternion::j(), Quaternion::k()];
    let gens = su2_generators::<T>();
    let generators = [0, 1, 2].map(|a| {
        conjugate(&d, &complex_to_quaternionic(&gens[a])).max_abs_diff(&quaternion_diag(units[a], units[a]))
    });
    let real = |v: T| Quaternion::new(v, T::zero(), T::zero(), T::zero());
    let target = quaternion_diag(real(g.a + g.z.norm()), real(g.a - g.z.norm()));
    let gm = g.matrix();
    let mut evolution = T::zero();
    let mut off = T::zero();
    for s in states {
        let du = conjugate(&d, &complex_to_quaternionic(&s.matrix()));
        let q = Quaternion::from_complex(s.f.conj()) - Quaternion::j() * Quaternion::from_complex(s.l.conj());
        evolution = evolution.max(du.max_abs_diff(&quaternion_diag(q, q)));
        off = off.max(du[(0, 1)].norm().max(du[(1, 0)].norm()));
    }
    DiagonalizationReport {
        unitarity: (&d * &d.adjoint()).max_abs_diff(&Matrix::identity(2)),
        generators,
        commutant: conjugate(&d, &gm).max_abs_diff(&target),
        commutant_rotated: conjugate(&diagonalizer_for(g.z), &gm).max_abs_diff(&target),
        evolution,
        evolution_off_diagonal: off,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &Matrix<C<f64>>, b: &Matrix<C<f64>>, tol: f64) -> bool {
        a.max_abs_diff(b) < tol
    }

    #[test]
    fn generators_satisfy_su2_relations() {
        let [j1, j2, j3] = su2_generators::<f64>();
        assert_eq!(Matrix::commutator(&j1, &j2).unwrap(), j3.scale(-1.0));
        assert_eq!(Matrix::commutator(&j2, &j3).unwrap(), j1.scale(-1.0));
        assert_eq!(Matrix::commutator(&j3, &j1).unwrap(), j2.scale(-1.0));
        assert_eq!(&j1 * &j1, Matrix::identity(2).scale(-0.25));
        for j in [&j1, &j2, &j3] {
            assert_eq!(j.adjoint(), j.scale(-1.0));
        }
    }

    #[test]
    fn hamiltonian_is_generator_combination() {
        let [j1, j2, j3] = su2_generators::<f64>();
        for (w, o0, o1) in [(2.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.7, -1.3, 0.4)] {
            let h = hamiltonian_matrix(&TwoLevelHamiltonian::constant(w, o0, o1), 0.0);
            let comb = &(&j1.scale(2.0 * o0) + &j2.scale(2.0 * o1)) + &j3.scale(w);
            assert!(close(&h, &comb, 1e-15));
            assert_eq!(h.adjoint(), h.scale(-1.0));
        }
    }

    #[test]
    fn zero_time_gives_identity() {
        let tr = evolve(&TwoLevelHamiltonian::constant(1.0, 1.0, 0.0), 0.0, 1e-3).unwrap();
        assert_eq!(tr.states.len(), 1);
        assert_eq!(tr.states[0].f, c(1.0, 0.0));
        assert_eq!(tr.states[0].l, c(0.0, 0.0));
    }

    #[test]
    fn rabi_oscillation_matches_closed_form() {
        let tr = evolve(&TwoLevelHamiltonian::constant(0.0f64, 1.0, 0.0), 2.0, 1e-4).unwrap();
        for s in tr.states.iter().step_by(997) {
            assert!((s.f - c(s.t.cos(), 0.0)).norm() < 1e-6);
            assert!((s.l - c(0.0, -s.t.sin())).norm() < 1e-6);
        }
        assert!(tr.max_norm_defect < 1e-9 && tr.max_ck_defect < 1e-9);
    }

    #[test]
    fn oracle_full_transfer() {
        let u = constant_oracle(0.0, c(1.0, 0.0), PI / 2.0);
        let expect = cmat([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, -1.0), c(0.0, 0.0)]]);
        assert!(close(&u, &expect, 1e-15));
        assert!(close(&constant_oracle(0.3, c(0.2, 0.1), 0.0), &Matrix::identity(2), 1e-15));
        let zero = constant_oracle(0.0, c(0.0, 0.0), 5.0);
        assert!(close(&zero, &Matrix::identity(2), 1e-15));
    }

    #[test]
    fn piecewise_drive_keeps_shape() {
        let h = TwoLevelHamiltonian::piecewise(vec![
            DriveSegment { start: 0.0, omega: 1.0, omega0: 0.5, omega1: 0.0 },
            DriveSegment { start: 0.37, omega: -2.0, omega0: 0.0, omega1: 1.5 },
            DriveSegment { start: 0.81, omega: 0.0, omega0: 2.0, omega1: -0.5 },
        ])
        .unwrap();
        let tr = evolve(&h, 1.5, 1e-3).unwrap();
        assert!(tr.max_ck_defect < 1e-9 && tr.max_unitarity_defect < 1e-9);
        assert!(TwoLevelHamiltonian::<f64>::piecewise(vec![]).is_err());
    }

    #[test]
    fn commutant_spectrum_and_biunitarity() {
        let g = CommutantG::new(2.0f64, c(0.0, 1.0)).unwrap();
        let ev = g.computed_eigenvalues().unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
        assert!(CommutantG::new(0.5, c(0.5, 0.0)).is_err());
        let g = CommutantG::new(1.0, c(0.5, 0.0)).unwrap();
        let u = constant_oracle(0.4, c(0.3, -0.8), 1.7);
        assert!(check_biunitary(&u, &g.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn probabilities_at_start_and_transfer() {
        let g = CommutantG::new(1.0f64, c(0.0, 0.5)).unwrap();
        let s0 = CKState::from_unitary(0.0, &Matrix::identity(2));
        let (p, pp) = transition_probabilities(&s0, &g);
        assert_eq!(p, 0.0);
        assert!((pp - 0.25).abs() < 1e-15);
        let s = CKState::from_unitary(PI / 2.0, &constant_oracle(0.0, c(1.0, 0.0), PI / 2.0));
        let (p, pp) = transition_probabilities(&s, &g);
        assert!((p - 1.0).abs() < 1e-15 && (pp - 1.0).abs() < 1e-15);
        let scalar = CommutantG::new(1.3f64, c(0.0, 0.0)).unwrap();
        let s = CKState::from_unitary(0.9, &constant_oracle(0.2, c(0.7, 0.1), 0.9));
        let (p, pp) = transition_probabilities(&s, &scalar);
        assert!((p - pp).abs() < 1e-15);
    }

    #[test]
    fn general_a_normalisation() {
        let g = CommutantG::new(2.0f64, c(0.6, 0.8)).unwrap();
        let s = CKState::from_unitary(0.9, &constant_oracle(0.2, c(0.7, 0.1), 0.9));
        let (_, pp) = transition_probabilities(&s, &g);
        let expect = (s.f.norm_sqr() + 4.0 * s.l.norm_sqr()) / 4.0;
        assert!((pp - expect).abs() < 1e-14);
    }

    #[test]
    fn d_conjugations() {
        let g = CommutantG::new(2.0f64, c(0.0, 1.0)).unwrap();
        let tr = evolve(&TwoLevelHamiltonian::constant(0.3, 1.0, -0.4), 1.0, 1e-3).unwrap();
        let r = diagonalize_d(&g, &tr.states);
        assert!(r.unitarity < 1e-15);
        assert!(r.commutant < 1e-15);
        assert!(r.evolution < 1e-12 && r.evolution_off_diagonal < 1e-12, "{r:?}");
        // conjugation preserves norms, |J_a| = 1/2 while |diag(e, e)| = 1
        assert!(r.generators.iter().all(|&v| v > 0.4));
    }

    #[test]
    fn rotated_diagonalizer_handles_every_z() {
        let g = CommutantG::new(2.0, c(0.6, -0.3)).unwrap();
        let r = diagonalize_d(&g, &[]);
        assert!(r.commutant > 0.1);
        assert!(r.commutant_rotated < 1e-14);
        let u = constant_oracle(0.4, c(0.3, -0.8), 1.7);
        let dz = diagonalizer_for(g.z);
        let du = conjugate(&dz, &complex_to_quaternionic(&u));
        assert!(du[(0, 1)].norm() < 1e-14 && du[(1, 0)].norm() < 1e-14);
    }
}
