//! The acceptance suite: each criterion recomputes its quantities from a seed
//! and compares them with fixed tolerances. Shared by `biham paper-check`
//! and the `acceptance` test target.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::defalg::{compare_s_and_s_k, derivation_check, DeformedAlgebra};
use crate::geomqm::{
    bracket_comparison, deformed_structures, lie_derivative_at, oscillator_field, Family, LIE_STEP,
};
use crate::hermpair::{genericity_report, group_label, HermitianForm, Tolerances};
use crate::qalg::{vandermonde_counterpart_det, Matrix, Quaternion};
use crate::qdyn::{
    check_biunitary, constant_oracle, d_matrix, diagonalize_d, evolve, su2_generators, transition_probabilities,
    CommutantG, DriveSegment, TwoLevelHamiltonian,
};
use crate::random::{self, TrialRng};
use crate::scalar::{FieldKind, HilbertScalar, Scalar};
use crate::Result;

type Q = Quaternion<f64>;
type C = Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub metrics: BTreeMap<String, f64>,
}

impl CriterionOutcome {
    fn new(id: &str, title: &str) -> Self {
        CriterionOutcome { id: id.into(), title: title.into(), passed: true, detail: String::new(), metrics: BTreeMap::new() }
    }

    fn metric(&mut self, name: &str, v: f64) -> &mut Self {
        self.metrics.insert(name.into(), v);
        self
    }

    /// Records `value < tol` (or `>` when `above`), failing the criterion if not.
    fn bound(&mut self, name: &str, value: f64, tol: f64, above: bool) -> &mut Self {
        let ok = if above { value > tol } else { value < tol };
        if !ok {
            self.fail(format!("{name} = {value:.3e} (needs {} {tol:.0e})", if above { ">" } else { "<" }));
        }
        self.metric(name, value)
    }

    fn fail(&mut self, why: String) {
        self.passed = false;
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(&why);
    }

    fn from_result(id: &str, title: &str, r: Result<CriterionOutcome>) -> Self {
        r.unwrap_or_else(|e| {
            let mut o = CriterionOutcome::new(id, title);
            o.fail(format!("error: {e}"));
            o
        })
    }

    /// One line: `PASS 6a  geometry invariance ...`.
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        if self.detail.is_empty() {
            format!("{verdict} {:<4} {}", self.id, self.title)
        } else {
            format!("{verdict} {:<4} {}: {}", self.id, self.title, self.detail)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionOutcome>,
}

/// Every criterion id in order.
pub const CRITERIA: [&str; 16] = ["1", "2", "3", "4", "5", "6a", "6b", "6c", "7", "8", "9", "10a", "10b", "10c", "10d", "10e"];

fn rng_for(seed: u64, salt: u64) -> TrialRng {
    random::rng_from_seed(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
}

/// Runs one criterion by id.
pub fn run_criterion(id: &str, seed: u64) -> Option<CriterionOutcome> {
    Some(match id {
        "1" => genericity_equivalence(seed),
        "2" => quaternionic_def3(seed),
        "3" => determinant_identity(seed),
        "4" => signatures(),
        "5" => deformed_algebra(seed),
        "6a" => geometry_invariance(seed),
        "6b" => chart_consistency(seed),
        "6c" => bracket_factor(),
        "7" => darboux_family(),
        "8" => bracket_identity(seed),
        "9" => two_level(),
        "10a" => biunitarity(seed),
        "10b" => d_unitary(),
        "10c" => d_commutant(),
        "10d" => d_generators(),
        "10e" => d_evolution(seed),
        _ => return None,
    })
}

pub fn run_all(seed: u64) -> SuiteReport {
    let criteria: Vec<CriterionOutcome> = CRITERIA.iter().filter_map(|id| run_criterion(id, seed)).collect();
    SuiteReport { seed, passed: criteria.iter().all(|c| c.passed), criteria }
}

fn forms<S: HilbertScalar<Real = f64>>(rng: &mut TrialRng, n: usize, degenerate: bool) -> Result<(HermitianForm<S>, HermitianForm<S>)> {
    let spec: Vec<f64> = random::spectrum(rng, n, degenerate);
    let (a, b) = random::hermitian_pair::<S>(rng, &spec);
    Ok((HermitianForm::new(a, 1e-10)?, HermitianForm::new(b, 1e-10)?))
}

fn genericity_equivalence(seed: u64) -> CriterionOutcome {
    let (id, title) = ("1", "genericity predicates agree (complex)");
    CriterionOutcome::from_result(id, title, (|| {
        let mut o = CriterionOutcome::new(id, title);
        let mut rng = rng_for(seed, 1);
        let tol = Tolerances::default();
        let (mut generic, mut disagree) = (0usize, 0usize);
        for trial in 0..200 {
            let n = 2 + trial % 4;
            let (h1, h2) = forms::<C>(&mut rng, n, trial % 2 == 1)?;
            let r = genericity_report(&h1, &h2, &tol)?;
            if r.distinct_spectrum {
                generic += 1;
            }
            if !(r.distinct_spectrum == r.cyclic && r.cyclic == r.def3_holds) {
                disagree += 1;
            }
        }
        o.metric("trials", 200.0).metric("generic", generic as f64).metric("disagreements", disagree as f64);
        if disagree > 0 {
            o.fail(format!("{disagree} of 200 trials disagree"));
        }
        if generic == 0 || generic == 200 {
            o.fail("sample does not cover both generic and degenerate pairs".into());
        }
        Ok(o)
    })())
}

fn quaternionic_def3(seed: u64) -> CriterionOutcome {
    let (id, title) = ("2", "quaternionic commutant 4n, bicommutant n");
    CriterionOutcome::from_result(id, title, (|| {
        let mut o = CriterionOutcome::new(id, title);
        let mut rng = rng_for(seed, 2);
        let tol = Tolerances::default();
        let mut bad = 0;
        for trial in 0..20 {
            let n = 2 + trial % 2;
            let (h1, h2) = forms::<Q>(&mut rng, n, false)?;
            let r = genericity_report(&h1, &h2, &tol)?;
            if !(r.distinct_spectrum && r.commutant_real_dim == 4 * n && r.bicommutant_real_dim == n && !r.def3_holds) {
                bad += 1;
            }
        }
        o.metric("trials", 20.0).metric("failures", bad as f64);
        if bad > 0 {
            o.fail(format!("{bad} of 20 pairs off"));
        }
        Ok(o)
    })())
}

fn determinant_identity(seed: u64) -> CriterionOutcome {
    let (id, title) = ("3", "counterpart determinant = prod|mu|^2 V^2");
    CriterionOutcome::from_result(id, title, (|| {
        let mut o = CriterionOutcome::new(id, title);
        let mut rng = rng_for(seed, 3);
        let mut worst = 0.0f64;
        for trial in 0..100 {
            let n = 1 + trial % 4;
            let lambdas: Vec<f64> = random::spectrum(&mut rng, n, false);
            let mus: Vec<Q> = (0..n).map(|_| random::nonzero_scalar(&mut rng)).collect();
            worst = worst.max(vandermonde_counterpart_det(&lambdas, &mus)?.relative_defect());
        }
        o.bound("max_relative_defect", worst, 1e-8, false);
        Ok(o)
    })())
}

fn label_for<S: HilbertScalar<Real = f64>>(spectrum: &[f64]) -> Result<String> {
    let h2 = HermitianForm::<S>::new(Matrix::from_real_diagonal(spectrum), 1e-12)?;
    Ok(genericity_report(&HermitianForm::identity(spectrum.len()), &h2, &Tolerances::default())?.group_label)
}

fn signatures() -> CriterionOutcome {
    let (id, title) = ("4", "bi-unitary group labels");
    CriterionOutcome::from_result(id, title, (|| {
        let mut o = CriterionOutcome::new(id, title);
        let cases: [(&[f64], &[usize]); 3] = [(&[1.0, 1.0, 2.0], &[2, 1]), (&[1.5, 1.5, 1.5], &[3]), (&[1.0, 2.0, 3.0], &[1, 1, 1])];
        let mut labels = Vec::new();
        for (spec, degs) in cases {
            for (field, got) in [(FieldKind::Complex, label_for::<C>(spec)?), (FieldKind::Quaternionic, label_for::<Q>(spec)?)] {
                let want = group_label(degs, field);
                let literal = degs
                    .iter()
                    .map(|d| if field == FieldKind::Quaternionic { format!("U({d},Q)") } else { format!("U({d})") })
                    .collect::<Vec<_>>()
                    .join("x");
                if got != want || got != literal {
                    o.fail(format!("{got} != {literal}"));
                }
                labels.push(got);
            }
        }
        if o.passed {
            o.detail = labels.join(" ");
        }
        Ok(o)
    })())
}

fn positive_k<S: Scalar<Real = f64>>(rng: &mut TrialRng, n: usize) -> Matrix<S> {
    let c = random::near_identity::<S>(rng, n, 0.3);
    &(&c.adjoint() * &c) + &Matrix::identity(n).scale(0.2)
}

fn rel<S: Scalar<Real = f64>>(a: &Matrix<S>, b: &Matrix<S>) -> f64 {
    a.max_abs_diff(b) / a.max_abs().max(b.max_abs()).max(1.0)
}

fn algebra_laws<S: Scalar<Real = f64>>(rng: &mut TrialRng, n: usize) -> Result<[f64; 3]> {
    let k = random::near_identity::<S>(rng, n, 0.3);
    let alg = DeformedAlgebra::new(k)?;
    let (a, b, c) = (random::matrix::<S>(rng, n, n), random::matrix::<S>(rng, n, n), random::matrix::<S>(rng, n, n));
    let assoc = rel(&alg.product(&alg.product(&a, &b)?, &c)?, &alg.product(&a, &alg.product(&b, &c)?)?);
    let e = alg.identity();
    let ident = rel(&alg.product(e, &a)?, &a).max(rel(&alg.product(&a, e)?, &a));
    let iso = rel(&alg.phi(&(&a * &b))?, &alg.product(&alg.phi(&a)?, &alg.phi(&b)?)?);
    Ok([assoc, ident, iso])
}

fn deformed_algebra(seed: u64) -> CriterionOutcome {
    let (id, title) = ("5", "deformed product laws");
    CriterionOutcome::from_result(id, title, (|| {
        let mut o = CriterionOutcome::new(id, title);
        let mut rng = rng_for(seed, 5);
        let mut laws = [0.0f64; 3];
        let mut span = 0.0f64;
        let mut span_unequal = 0;
        let mut commuting = 0.0f64;
        let mut generic_min = f64::INFINITY;
        for trial in 0..100 {
            let n = 2 + trial % 3;
            let l = if trial % 2 == 0 { algebra_laws::<C>(&mut rng, n)? } else { algebra_laws::<Q>(&mut rng, n)? };
            for i in 0..3 {
                laws[i] = laws[i].max(l[i]);
            }
            let k = positive_k::<C>(&mut rng, n);
            let cmp = compare_s_and_s_k(&k, 1e-9, 1e-8)?;
            span = span.max(cmp.span_distance);
            if !cmp.equal {
                span_unequal += 1;
            }
            // H a polynomial in K commutes; a random H does not
            let h = &(&k * &k) + &k.scale(2.0);
            let d = derivation_check(&h, &k, 3, 1e-10, &mut rng)?;
            commuting = commuting.max(d.max_defect);
            let hr = random::hermitian::<C>(&mut rng, n);
            let d = derivation_check(&hr, &k, 3, 1e-10, &mut rng)?;
            generic_min = generic_min.min(d.max_defect);
        }
        o.bound("associativity", laws[0], 1e-10, false)
            .bound("identity", laws[1], 1e-10, false)
            .bound("isomorphism", laws[2], 1e-10, false)
            .bound("s_vs_s_k_distance", span, 1e-10, false)
            .bound("derivation_defect_commuting", commuting, 1e-10, false)
            .bound("derivation_defect_noncommuting_min", generic_min, 1e-10, true);
        o.metric("s_vs_s_k_unequal", span_unequal as f64);
        if span_unequal > 0 {
            o.fail(format!("S != S_K in {span_unequal} trials"));
        }
        Ok(o)
    })())
}

fn sample_points(rng: &mut TrialRng, count: usize, dim: usize, radius: f64) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..dim).map(|_| random::real_in(rng, -radius, radius)).collect()).collect()
}

fn geometry_invariance(seed: u64) -> CriterionOutcome {
    let (id, title) = ("6a", "oscillator flow preserves g_lambda, omega_lambda");
    CriterionOutcome::from_result(id, title, (|| {
        let mut o = CriterionOutcome::new(id, title);
        let mut rng = rng_for(seed, 6);
        let d = deformed_structures(1, 0.3)?;
        let gamma = oscillator_field::<f64>(1);
        let (w, g, j) = (d.symplectic(), d.metric(), d.complex_structure());
        let (mut lw, mut lg, mut lj) = (0.0f64, 0.0f64, 0.0f64);
        for x in sample_points(&mut rng, 100, 2, 1.5) {
            lw = lw.max(lie_derivative_at(&gamma, &w, &x, LIE_STEP)?.max_abs());
            lg = lg.max(lie_derivative_at(&gamma, &g, &x, LIE_STEP)?.max_abs());
            lj = lj.max(lie_derivative_at(&gamma, &j, &x, LIE_STEP)?.max_abs());
        }
        o.bound("lie_omega", lw, 1e-6, false).bound("lie_metric", lg, 1e-6, false).bound("lie_complex_structure", lj, 1e-6, false);
        Ok(o)
    })())
}

fn chart_consistency(seed: u64) -> CriterionOutcome {
    let (id, title) = ("6b", "closed forms match chart pullbacks");
    CriterionOutcome::from_result(id, title, (|| {
        let mut o = CriterionOutcome::new(id, title);
        let mut rng = rng_for(seed, 7);
        let d = deformed_structures(1, 0.3)?;
        let (mut g, mut w, mut p) = (0.0f64, 0.0f64, 0.0f64);
        for x in sample_points(&mut rng, 100, 2, 1.5) {
            let c = d.pullback_defects(&x, 1e-6)?;
            g = g.max(c.metric);
            w = w.max(c.symplectic);
            p = p.max(c.bracket);
        }
        o.bound("metric", g, 1e-6, false).bound("symplectic", w, 1e-6, false).bound("bracket", p, 1e-6, false);
        Ok(o)
    })())
}

fn bracket_factor() -> CriterionOutcome {
    let (id, title) = ("6c", "{Q,P} factor at (1,0), lambda = 1 equals 1/4");
    CriterionOutcome::from_result(id, title, (|| {
        let mut o = CriterionOutcome::new(id, title);
        let d = deformed_structures(1, 1.0)?;
        let f = d.bracket_factor(&[1.0, 0.0])?[0];
        o.metric("bracket_factor", f).metric("symplectic_coefficient", d.symplectic_at(&[1.0, 0.0])?[(0, 1)]);
        if f != 0.25 {
            o.fail(format!("computed {f:.12} (omega coefficient {:.12})", 1.0 / f));
        }
        Ok(o)
    })())
}

fn darboux_family() -> CriterionOutcome {
    let (id, title) = ("7", "Darboux family recovers f(s) = lambda s");
    CriterionOutcome::from_result(id, title, (|| {
        let mut o = CriterionOutcome::new(id, title);
        for l in [0.1, 0.5] {
            let sol = Family::Lambda(l).solution::<f64>();
            let mut worst = 0.0f64;
            for i in 0..=400 {
                let s = 0.01 * i as f64;
                worst = worst.max((sol.eval(s)? - l * s).abs());
            }
            o.bound(&format!("max_error_lambda_{l}"), worst, 1e-8, false);
        }
        Ok(o)
    })())
}

fn bracket_identity(seed: u64) -> CriterionOutcome {
    let (id, title) = ("8", "[f_s0, f_s3] = f_{2 s0 s3}, broken by lambda = 0.1");
    CriterionOutcome::from_result(id, title, (|| {
        let mut o = CriterionOutcome::new(id, title);
        let mut rng = rng_for(seed, 8);
        let pts = sample_points(&mut rng, 100, 4, 1.0);
        let c = bracket_comparison(&pts, 0.1)?;
        o.bound("darboux_defect", c.darboux_max_defect, 1e-6, false).bound("deformed_defect", c.deformed_max_defect, 1e-3, true);
        Ok(o)
    })())
}

fn rabi() -> Result<crate::qdyn::Trajectory<f64>> {
    evolve(&TwoLevelHamiltonian::constant(0.0, 1.0, 0.0), 2.0 * std::f64::consts::PI, 1e-4)
}

fn two_level() -> CriterionOutcome {
    let (id, title) = ("9", "two-level evolution and transition probabilities");
    CriterionOutcome::from_result(id, title, (|| {
        let mut o = CriterionOutcome::new(id, title);
        let tr = rabi()?;
        let g = CommutantG::new(1.0, C::new(0.0, 0.5))?;
        let (mut oracle, mut p_err, mut pp_err) = (0.0f64, 0.0f64, 0.0f64);
        for s in &tr.states {
            oracle = oracle.max(s.matrix().max_abs_diff(&constant_oracle(0.0, C::new(1.0, 0.0), s.t)));
            let (p, pp) = transition_probabilities(s, &g);
            p_err = p_err.max((p - s.l.norm_sqr()).abs());
            pp_err = pp_err.max((pp - (g.z.norm_sqr() * s.f.norm_sqr() + s.l.norm_sqr())).abs());
        }
        let (p0, pp0) = transition_probabilities(&tr.states[0], &g);
        o.bound("oracle_defect", oracle, 1e-6, false)
            .bound("norm_defect", tr.max_norm_defect, 1e-9, false)
            .bound("p_defect", p_err, 1e-8, false)
            .bound("p_prime_defect", pp_err, 1e-8, false)
            .bound("p_at_zero", p0.abs(), 1e-15, false)
            .bound("p_prime_at_zero_minus_quarter", (pp0 - 0.25).abs(), 1e-15, false);
        Ok(o)
    })())
}

fn biunitarity(seed: u64) -> CriterionOutcome {
    let (id, title) = ("10a", "U^dagger G U = G along trajectories");
    CriterionOutcome::from_result(id, title, (|| {
        let mut o = CriterionOutcome::new(id, title);
        let mut rng = rng_for(seed, 10);
        let mut trajectories = vec![rabi()?];
        let mut segs = Vec::new();
        let mut t = 0.0;
        for _ in 0..5 {
            segs.push(DriveSegment { start: t, omega: random::real_in(&mut rng, -2.0, 2.0), omega0: random::real(&mut rng), omega1: random::real(&mut rng) });
            t += random::real_in::<f64>(&mut rng, 0.2, 1.0);
        }
        trajectories.push(evolve(&TwoLevelHamiltonian::piecewise(segs)?, t, 1e-3)?);
        let mut gs = vec![CommutantG::new(1.0, C::new(0.0, 0.5))?];
        for _ in 0..3 {
            let z = C::new(random::real::<f64>(&mut rng), random::real::<f64>(&mut rng));
            gs.push(CommutantG::new(z.norm() + random::real_in::<f64>(&mut rng, 0.1, 1.0), z)?);
        }
        let mut worst = 0.0f64;
        for tr in &trajectories {
            for s in tr.states.iter().step_by(50) {
                for g in &gs {
                    worst = worst.max(check_biunitary(&s.matrix(), &g.matrix())?);
                }
            }
        }
        o.bound("biunitarity_defect", worst, 1e-10, false);
        Ok(o)
    })())
}

fn d_unitary() -> CriterionOutcome {
    let mut o = CriterionOutcome::new("10b", "D D^dagger = I");
    let d = d_matrix::<f64>();
    o.bound("defect", (&d * &d.adjoint()).max_abs_diff(&Matrix::identity(2)), 1e-12, false);
    o
}

fn d_commutant() -> CriterionOutcome {
    let (id, title) = ("10c", "D G D^dagger = diag(a + |z|, a - |z|)");
    CriterionOutcome::from_result(id, title, (|| {
        let mut o = CriterionOutcome::new(id, title);
        let mut worst = 0.0f64;
        for (a, z) in [(1.0, C::new(0.0, 0.5)), (2.0, C::new(0.0, 1.0))] {
            worst = worst.max(diagonalize_d(&CommutantG::new(a, z)?, &[]).commutant);
        }
        o.bound("defect", worst, 1e-12, false);
        Ok(o)
    })())
}

fn d_generators() -> CriterionOutcome {
    let mut o = CriterionOutcome::new("10d", "D J_a D^dagger = diag(i,i), diag(j,j), diag(k,k)");
    let g = CommutantG { a: 1.0, z: C::new(0.0, 0.5) };
    let r = diagonalize_d(&g, &[]);
    for (name, v) in ["j1", "j2", "j3"].iter().zip(r.generators) {
        o.bound(&format!("defect_{name}"), v, 1e-12, false);
    }
    let gens = su2_generators::<f64>();
    o.metric("generator_norm", gens[0].frobenius_norm() / 2f64.sqrt());
    o
}

fn d_evolution(seed: u64) -> CriterionOutcome {
    let (id, title) = ("10e", "D U D^dagger = diag(q, q), q = conj F - j conj L");
    CriterionOutcome::from_result(id, title, (|| {
        let mut o = CriterionOutcome::new(id, title);
        let mut rng = rng_for(seed, 11);
        let h = TwoLevelHamiltonian::constant(random::real(&mut rng), random::real(&mut rng), random::real(&mut rng));
        let tr = evolve(&h, 3.0, 1e-3)?;
        let r = diagonalize_d(&CommutantG::new(1.0, C::new(0.0, 0.5))?, &tr.states);
        o.bound("defect", r.evolution, 1e-9, false);
        Ok(o)
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_criterion() {
        assert!(run_criterion("11", 0).is_none());
    }

    #[test]
    fn lines_carry_verdicts() {
        let o = d_unitary();
        assert!(o.passed && o.line().starts_with("PASS 10b"));
    }
}
