use std::collections::BTreeMap;
use std::path::Path;

use biham_core::checks::{self, SuiteReport, CRITERIA};
use biham_core::defalg::{
    compare_s_and_s_k, derivation_check, subalgebra_s, AdjointPair, DeformedAlgebra, DerivationCheck, SpanComparison,
};
use biham_core::geomqm::{
    bracket_comparison, deformed_structures, dj_form, lie_derivative_at, omega_from, oscillator_field,
    AdmissibilityReport, BracketComparison, ChartDefects, DeformedStructures, DjFit, Family, GRADIENT_STEP, LIE_STEP,
    QUADRATURE_REL_TOL,
};
use biham_core::hermpair::{genericity_report, HermitianForm, Tolerances};
use biham_core::qalg::{Matrix, MatrixJson};
use biham_core::qdyn::{check_biunitary, evolve, transition_probabilities, CommutantG, CK_ABORT};
use biham_core::random::{self, TrialRng};
use biham_core::{HilbertScalar, Quat, C64};
use serde::{Deserialize, Serialize};

use crate::drive::{Drive, DriveDescription};
use crate::io::{emit, matrix_arg, parse_json, read_source, to_json, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Complex,
    #[value(alias = "quaternion")]
    #[serde(alias = "quaternion")]
    Quaternionic,
}

// generic-report

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairInput {
    #[serde(default)]
    field: Option<Field>,
    h1: MatrixJson,
    h2: MatrixJson,
}

pub struct GenericArgs<'a> {
    pub input: Option<&'a str>,
    pub h1: Option<&'a str>,
    pub h2: Option<&'a str>,
    pub field: Field,
    pub tolerances: Tolerances<f64>,
}

pub fn generic_report(args: GenericArgs, out: Option<&Path>) -> CliResult<()> {
    let (field, h1, h2) = match (args.input, args.h1, args.h2) {
        (Some(src), None, None) => {
            let p: PairInput = parse_json(&read_source(src)?, "pair input")?;
            (p.field.unwrap_or(args.field), p.h1, p.h2)
        }
        (None, Some(a), Some(b)) => {
            let h1 = parse_json(&read_source(a)?, "--h1")?;
            let h2 = parse_json(&read_source(b)?, "--h2")?;
            (args.field, h1, h2)
        }
        _ => return Err(CliError::Usage("give either --input or both --h1 and --h2".into())),
    };
    let text = match field {
        Field::Complex => report_for::<C64>(&h1, &h2, &args.tolerances)?,
        Field::Quaternionic => report_for::<Quat>(&h1, &h2, &args.tolerances)?,
    };
    emit(out, &text)
}

fn form<S: HilbertScalar<Real = f64>>(m: &MatrixJson, name: &str, tol: f64) -> CliResult<HermitianForm<S>> {
    let gram = m.to_matrix::<S>().map_err(|e| CliError::Usage(format!("{name}: {e}")))?;
    HermitianForm::new(gram, tol).map_err(|e| CliError::Usage(format!("{name}: {e}")))
}

fn report_for<S: HilbertScalar<Real = f64>>(h1: &MatrixJson, h2: &MatrixJson, tol: &Tolerances<f64>) -> CliResult<String> {
    let a = form::<S>(h1, "h1", tol.hermitian)?;
    let b = form::<S>(h2, "h2", tol.hermitian)?;
    to_json(&genericity_report(&a, &b, tol)?)
}

// deform

pub struct DeformArgs<'a> {
    pub k: &'a str,
    pub g: Option<&'a str>,
    pub h: Option<&'a str>,
    pub field: Field,
    pub trials: usize,
    pub seed: u64,
    pub tolerances: DeformTolerances,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeformTolerances {
    pub null: f64,
    pub span: f64,
    pub derivation: f64,
    pub max_condition: f64,
}

#[derive(Debug, Serialize)]
struct LawDefects {
    associativity: f64,
    identity: f64,
    isomorphism: f64,
    phi_round_trip: f64,
}

#[derive(Debug, Serialize)]
struct AdjointDefects {
    involution: f64,
    antihomomorphism: f64,
    contract: f64,
    s_real_dim: usize,
    star_minus_dagger_on_s: f64,
}

#[derive(Debug, Serialize)]
struct DeformReport {
    field: Field,
    dimension: usize,
    seed: u64,
    trials: usize,
    condition: f64,
    identity: MatrixJson,
    laws: LawDefects,
    subalgebras: SpanComparison<f64>,
    derivation: Option<DerivationCheck<f64>>,
    adjoints: Option<AdjointDefects>,
    tolerances: DeformTolerances,
}

pub fn deform(args: DeformArgs, out: Option<&Path>) -> CliResult<()> {
    let text = match args.field {
        Field::Complex => deform_for::<C64>(&args)?,
        Field::Quaternionic => deform_for::<Quat>(&args)?,
    };
    emit(out, &text)
}

fn rel<S: HilbertScalar<Real = f64>>(a: &Matrix<S>, b: &Matrix<S>) -> f64 {
    a.max_abs_diff(b) / a.max_abs().max(b.max_abs()).max(1.0)
}

fn deform_for<S: HilbertScalar<Real = f64>>(args: &DeformArgs) -> CliResult<String> {
    let tol = args.tolerances;
    let k: Matrix<S> = matrix_arg(args.k, "--k")?;
    if !k.is_square() {
        return Err(CliError::Usage("--k must be square".into()));
    }
    let n = k.rows();
    let alg = DeformedAlgebra::with_condition_limit(k.clone(), tol.max_condition)?;
    let mut rng = random::rng_from_seed(args.seed);
    let mut laws = LawDefects { associativity: 0.0, identity: alg.identity_defect(), isomorphism: 0.0, phi_round_trip: 0.0 };
    for _ in 0..args.trials {
        let [a, b, c] = [0; 3].map(|_| random::matrix::<S>(&mut rng, n, n));
        let left = alg.product(&alg.product(&a, &b)?, &c)?;
        let right = alg.product(&a, &alg.product(&b, &c)?)?;
        laws.associativity = laws.associativity.max(rel(&left, &right));
        let iso = alg.product(&alg.phi(&a)?, &alg.phi(&b)?)?;
        laws.isomorphism = laws.isomorphism.max(rel(&alg.phi(&(&a * &b))?, &iso));
        laws.phi_round_trip = laws.phi_round_trip.max(rel(&alg.phi_inverse(&alg.phi(&a)?)?, &a));
    }
    let subalgebras = compare_s_and_s_k(&k, tol.null, tol.span)?;
    let derivation = match args.h {
        Some(src) => {
            let h: Matrix<S> = matrix_arg(src, "--h")?;
            if h.shape() != k.shape() {
                return Err(CliError::Usage("--h and --k must have the same shape".into()));
            }
            Some(derivation_check(&h, &k, args.trials.max(1), tol.derivation, &mut rng)?)
        }
        None => None,
    };
    let adjoints = match args.g {
        Some(src) => {
            let g: Matrix<S> = matrix_arg(src, "--g")?;
            if g.shape() != k.shape() {
                return Err(CliError::Usage("--g and --k must have the same shape".into()));
            }
            Some(adjoint_defects(&g, args.trials, tol.null, &mut rng)?)
        }
        None => None,
    };
    to_json(&DeformReport {
        field: args.field,
        dimension: n,
        seed: args.seed,
        trials: args.trials,
        condition: alg.condition(),
        identity: MatrixJson::from_matrix(alg.identity()),
        laws,
        subalgebras,
        derivation,
        adjoints,
        tolerances: tol,
    })
}

fn adjoint_defects<S: HilbertScalar<Real = f64>>(g: &Matrix<S>, trials: usize, null_tol: f64, rng: &mut TrialRng) -> CliResult<AdjointDefects> {
    HermitianForm::new(g.clone(), 1e-10).map_err(|e| CliError::Usage(format!("--g: {e}")))?;
    let pair = AdjointPair::standard(g)?;
    let n = g.rows();
    let mut r = AdjointDefects { involution: 0.0, antihomomorphism: 0.0, contract: 0.0, s_real_dim: 0, star_minus_dagger_on_s: 0.0 };
    for _ in 0..trials {
        let a = random::matrix::<S>(rng, n, n);
        let b = random::matrix::<S>(rng, n, n);
        r.involution = r.involution.max(rel(&pair.star(&pair.star(&a)), &a));
        r.antihomomorphism = r.antihomomorphism.max(rel(&pair.star(&(&a * &b)), &(&pair.star(&b) * &pair.star(&a))));
        r.contract = r.contract.max(pair.contract_defect(&a) / a.max_abs().max(1.0));
    }
    let s = subalgebra_s(g, false, null_tol)?;
    r.s_real_dim = s.real_dim;
    for a in &s.basis {
        r.star_minus_dagger_on_s = r.star_minus_dagger_on_s.max(pair.star(a).max_abs_diff(&pair.dagger(a)));
    }
    Ok(r)
}

// geometry-demo

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GeometryTolerances {
    pub lie_step: f64,
    pub gradient_step: f64,
    pub pullback_step: f64,
    pub closedness_step: f64,
    pub admissibility: f64,
    pub dj_spread: f64,
}

impl Default for GeometryTolerances {
    fn default() -> Self {
        GeometryTolerances {
            lie_step: LIE_STEP,
            gradient_step: GRADIENT_STEP,
            pullback_step: 1e-6,
            closedness_step: 1e-4,
            admissibility: 1e-6,
            dj_spread: 1e-4,
        }
    }
}

#[derive(Debug, Serialize)]
struct Invariance {
    lie_omega: f64,
    lie_metric: f64,
    lie_complex_structure: f64,
}

#[derive(Debug, Serialize)]
struct DjReport {
    #[serde(flatten)]
    fit: DjFit<f64>,
    constant_multiple: bool,
}

#[derive(Debug, Serialize)]
struct GeometryReport {
    lambda: f64,
    points: usize,
    seed: u64,
    radius: f64,
    admissibility: AdmissibilityReport<f64>,
    admissible: bool,
    invariance: Invariance,
    chart_defects: ChartDefects<f64>,
    bracket_factor_at_unit_q: f64,
    symplectic_coefficient_at_unit_q: f64,
    dj: DjReport,
    bracket_comparison: BracketComparison<f64>,
    tolerances: GeometryTolerances,
}

pub fn geometry_demo(lambda: f64, points: usize, seed: u64, radius: f64, out: Option<&Path>) -> CliResult<()> {
    if points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(CliError::Usage("--radius must be positive".into()));
    }
    let tol = GeometryTolerances::default();
    let d = deformed_structures(1, lambda).map_err(|e| CliError::Usage(format!("--lambda: {e}")))?;
    let mut rng = random::rng_from_seed(seed);
    let mut sample = |dim: usize| -> Vec<Vec<f64>> {
        (0..points).map(|_| (0..dim).map(|_| random::real_in(&mut rng, -radius, radius)).collect()).collect()
    };
    let plane = sample(2);
    let four = sample(4);

    let admissibility = d.triple().check(&plane, tol.closedness_step)?;
    let gamma = oscillator_field::<f64>(1);
    let (w, g, j) = (d.symplectic(), d.metric(), d.complex_structure());
    let mut inv = Invariance { lie_omega: 0.0, lie_metric: 0.0, lie_complex_structure: 0.0 };
    let mut chart = ChartDefects::<f64> { metric: 0.0, symplectic: 0.0, bracket: 0.0 };
    for x in &plane {
        inv.lie_omega = inv.lie_omega.max(lie_derivative_at(&gamma, &w, x, tol.lie_step)?.max_abs());
        inv.lie_metric = inv.lie_metric.max(lie_derivative_at(&gamma, &g, x, tol.lie_step)?.max_abs());
        inv.lie_complex_structure = inv.lie_complex_structure.max(lie_derivative_at(&gamma, &j, x, tol.lie_step)?.max_abs());
        let c = d.pullback_defects(x, tol.pullback_step)?;
        chart.metric = chart.metric.max(c.metric);
        chart.symplectic = chart.symplectic.max(c.symplectic);
        chart.bracket = chart.bracket.max(c.bracket);
    }
    let unit = [1.0, 0.0];
    let fit = dj_fit(&d, &plane)?;
    to_json(&GeometryReport {
        lambda,
        points,
        seed,
        radius,
        admissible: admissibility.holds(tol.admissibility),
        admissibility,
        invariance: inv,
        chart_defects: chart,
        bracket_factor_at_unit_q: d.bracket_factor(&unit)?[0],
        symplectic_coefficient_at_unit_q: d.symplectic_at(&unit)?[(0, 1)],
        dj: DjReport { constant_multiple: fit.spread <= tol.dj_spread, fit },
        bracket_comparison: bracket_comparison(&four, lambda)?,
        tolerances: tol,
    })
    .and_then(|text| emit(out, &text))
}

/// Least-squares `c` in `d d_J g = c omega`, reported even when the spread is large.
fn dj_fit(d: &DeformedStructures<f64>, points: &[Vec<f64>]) -> CliResult<DjFit<f64>> {
    let form = dj_form(&d.metric(), &d.complex_structure(), &d.liouville());
    let omega = omega_from(&d.metric(), &d.complex_structure());
    let mut pairs = Vec::with_capacity(points.len());
    let (mut num, mut den) = (0.0, 0.0);
    for p in points {
        let (r, w) = (form.eval(p)?, omega.eval(p)?);
        for (a, b) in r.data().iter().zip(w.data()) {
            num += a * b;
            den += b * b;
        }
        pairs.push((r, w));
    }
    let constant = num / den;
    let spread = pairs.iter().map(|(r, w)| r.max_abs_diff(&w.scale(constant)) / w.max_abs()).fold(0.0, f64::max);
    Ok(DjFit { constant, spread })
}

// darboux

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Serialize)]
struct DarbouxSample {
    s: f64,
    f: f64,
    exact: Option<f64>,
    ode_residual: f64,
}

#[derive(Debug, Serialize)]
struct DarbouxReport {
    family: String,
    s_max: f64,
    samples: Vec<DarbouxSample>,
    max_ode_residual: f64,
    max_exact_error: Option<f64>,
    tolerances: BTreeMap<&'static str, f64>,
}

pub fn darboux(family: &str, s_max: f64, samples: usize, step: f64, format: Format, out: Option<&Path>) -> CliResult<()> {
    let fam: Family = family.parse().map_err(|e: biham_core::Error| CliError::Usage(format!("--family: {e}")))?;
    if !(s_max >= 0.0) || !s_max.is_finite() {
        return Err(CliError::Usage("--s-max must be non-negative".into()));
    }
    if !(step > 0.0) {
        return Err(CliError::Usage("--residual-step must be positive".into()));
    }
    let sol = fam.solution::<f64>();
    let mut rows = Vec::with_capacity(samples);
    let bad_input = |e: biham_core::Error| match e {
        biham_core::Error::Domain(m) => CliError::Usage(format!("--family: {m}")),
        biham_core::Error::Validation(m) => CliError::Usage(format!("--samples: {m}")),
        other => other.into(),
    };
    for (s, f) in sol.sample(s_max, samples).map_err(bad_input)? {
        rows.push(DarbouxSample { s, f, exact: fam.exact(s), ode_residual: sol.ode_residual(s, step).map_err(bad_input)? });
    }
    let text = match format {
        Format::Json => {
            let max_exact_error = rows.iter().map(|r| r.exact.map(|e| (e - r.f).abs())).collect::<Option<Vec<_>>>().map(|v| v.into_iter().fold(0.0, f64::max));
            to_json(&DarbouxReport {
                family: fam.to_string(),
                s_max,
                max_ode_residual: rows.iter().map(|r| r.ode_residual).fold(0.0, f64::max),
                max_exact_error,
                samples: rows,
                tolerances: BTreeMap::from([("quadrature_rel_tol", QUADRATURE_REL_TOL), ("residual_step", step)]),
            })?
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let fail = |e: csv::Error| CliError::Failed(format!("writing csv: {e}"));
            w.write_record(["s", "f", "exact", "ode_residual"]).map_err(fail)?;
            for r in &rows {
                let exact = r.exact.map(|v| v.to_string()).unwrap_or_default();
                w.write_record([r.s.to_string(), r.f.to_string(), exact, r.ode_residual.to_string()]).map_err(fail)?;
            }
            csv_text(w)?
        }
    };
    emit(out, &text)
}

fn csv_text(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w.into_inner().map_err(|e| CliError::Failed(format!("writing csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Failed(e.to_string()))
}

// qdyn-sim

pub struct QdynArgs<'a> {
    pub omega: &'a str,
    pub omega0: Option<&'a str>,
    pub omega1: Option<&'a str>,
    pub a: f64,
    pub z: (f64, f64),
    pub total: f64,
    pub dt: f64,
    pub every: usize,
}

#[derive(Debug, Serialize)]
struct FinalState {
    t: f64,
    #[serde(rename = "F")]
    f: [f64; 2],
    #[serde(rename = "L")]
    l: [f64; 2],
    #[serde(rename = "P")]
    p: f64,
    #[serde(rename = "P_prime")]
    p_prime: f64,
}

#[derive(Debug, Serialize)]
struct QdynSummary {
    #[serde(rename = "T")]
    total: f64,
    dt: f64,
    steps: usize,
    a: f64,
    z: [f64; 2],
    drive: DriveDescription,
    max_unitarity_defect: f64,
    max_ck_defect: f64,
    max_norm_defect: f64,
    max_biunitarity_defect: f64,
    #[serde(rename = "final")]
    last: FinalState,
    tolerances: BTreeMap<&'static str, f64>,
}

pub fn qdyn_sim(args: QdynArgs, csv_out: Option<&Path>, summary_out: Option<&Path>) -> CliResult<()> {
    if args.every == 0 {
        return Err(CliError::Usage("--every must be positive".into()));
    }
    let drive = Drive::parse(args.omega, args.omega0, args.omega1)?;
    let z = C64::new(args.z.0, args.z.1);
    let g = CommutantG::new(args.a, z).map_err(|e| CliError::Usage(format!("--a/--z: {e}")))?;
    let h = drive.hamiltonian()?;
    let tr = evolve(&h, args.total, args.dt).map_err(|e| match e {
        biham_core::Error::Validation(m) => CliError::Usage(m),
        other => other.into(),
    })?;
    let defects = [tr.max_unitarity_defect, tr.max_ck_defect, tr.max_norm_defect];
    if defects.iter().any(|v| !v.is_finite()) || tr.states.iter().any(|s| !(s.f.norm_sqr() + s.l.norm_sqr()).is_finite()) {
        return Err(CliError::Failed("drive produced non-finite values".into()));
    }

    let gm = g.matrix();
    let mut biunitary = 0.0f64;
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Failed(format!("writing csv: {e}"));
    w.write_record(["t", "ReF", "ImF", "ReL", "ImL", "P", "P_prime"]).map_err(fail)?;
    let last = tr.states.len() - 1;
    for (i, s) in tr.states.iter().enumerate() {
        biunitary = biunitary.max(check_biunitary(&s.matrix(), &gm)?);
        if i % args.every == 0 || i == last {
            let (p, pp) = transition_probabilities(s, &g);
            let row = [s.t, s.f.re, s.f.im, s.l.re, s.l.im, p, pp];
            w.write_record(row.iter().map(|v| v.to_string())).map_err(fail)?;
        }
    }
    let s = &tr.states[last];
    let (p, p_prime) = transition_probabilities(s, &g);
    let summary = QdynSummary {
        total: args.total,
        dt: args.dt,
        steps: last,
        a: args.a,
        z: [z.re, z.im],
        drive: drive.describe(),
        max_unitarity_defect: tr.max_unitarity_defect,
        max_ck_defect: tr.max_ck_defect,
        max_norm_defect: tr.max_norm_defect,
        max_biunitarity_defect: biunitary,
        last: FinalState { t: s.t, f: [s.f.re, s.f.im], l: [s.l.re, s.l.im], p, p_prime },
        tolerances: BTreeMap::from([("ck_abort", CK_ABORT)]),
    };
    emit(csv_out, &csv_text(w)?)?;
    let text = to_json(&summary)?;
    match summary_out {
        Some(p) => emit(Some(p), &text),
        None => {
            eprint!("{text}");
            Ok(())
        }
    }
}

// paper-check

/// Runs the criteria; `Ok(false)` when any fails.
pub fn paper_check(seed: u64, only: &[String], json: bool, out: Option<&Path>) -> CliResult<bool> {
    if let Some(bad) = only.iter().find(|id| !CRITERIA.contains(&id.as_str())) {
        return Err(CliError::Usage(format!("unknown criterion '{bad}', expected one of {}", CRITERIA.join(", "))));
    }
    let report = if only.is_empty() {
        checks::run_all(seed)
    } else {
        let criteria: Vec<_> = CRITERIA.iter().filter(|id| only.iter().any(|o| o == *id)).filter_map(|id| checks::run_criterion(id, seed)).collect();
        SuiteReport { seed, passed: criteria.iter().all(|c| c.passed), criteria }
    };
    let text = if json {
        to_json(&report)?
    } else {
        let mut s = format!("paper-check, seed {seed}\n");
        for c in &report.criteria {
            s.push_str(&c.line());
            s.push('\n');
        }
        let passed = report.criteria.iter().filter(|c| c.passed).count();
        s.push_str(&format!("{passed} of {} criteria passed\n", report.criteria.len()));
        s
    };
    emit(out, &text)?;
    Ok(report.passed)
}
