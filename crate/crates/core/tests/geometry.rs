use biham_core::geomqm::{
    bracket_comparison, deformed_structures, dj_recovery, flow, gradient, hermitian_bracket, inverse_lambda_chart,
    lambda_chart, lambda_chart_jacobian, lie_derivative_at, linear_objects, oscillator_field, oscillator_hamiltonian,
    standard_triple, symplectic_coefficient, BracketContext, ComplexScalarField, Family, ScalarField, VectorField,
    LIE_STEP,
};
use biham_core::qalg::Matrix;
use biham_core::{random, Error};
use num_complex::Complex64;
use proptest::prelude::*;

fn points(seed: u64, count: usize, dim: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut rng = random::rng_from_seed(seed);
    (0..count).map(|_| (0..dim).map(|_| random::real_in(&mut rng, -radius, radius)).collect()).collect()
}

proptest! {
    #[test]
    fn chart_round_trip(q in -2.0f64..2.0, p in -2.0f64..2.0, q2 in -2.0f64..2.0, p2 in -2.0f64..2.0, lambda in 0.0f64..1.5) {
        let x = vec![q, q2, p, p2];
        let y = lambda_chart(&x, lambda).unwrap();
        let back = inverse_lambda_chart(&y, lambda).unwrap();
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn chart_determinant_is_the_symplectic_coefficient(q in -2.0f64..2.0, p in -2.0f64..2.0, lambda in 0.0f64..1.5) {
        let m = lambda_chart_jacobian(&[q, p], lambda).unwrap();
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let h = 0.5 * (q * q + p * p);
        let expect = (1.0 + lambda * h) * (1.0 + 3.0 * lambda * h);
        prop_assert!((det - expect).abs() < 1e-12 * expect);
        prop_assert!((symplectic_coefficient(q, p, lambda) - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn deformed_triple_is_admissible(seed in any::<u64>(), lambda in 0.0f64..1.0) {
        let d = deformed_structures(2, lambda).unwrap();
        let r = d.triple().check(&points(seed, 5, 4, 1.5), 1e-4).unwrap();
        prop_assert!(r.holds(1e-6), "{r:?}");
    }
}

#[test]
fn negative_lambda_is_rejected() {
    assert!(matches!(deformed_structures(1, -0.1), Err(Error::Domain(_))));
    assert!(matches!(lambda_chart(&[1.0, 0.0], -1.0), Err(Error::Domain(_))));
    assert!(matches!(lambda_chart(&[1.0, 0.0, 2.0], 0.5), Err(Error::Dimension(_))));
}

#[test]
fn standard_triple_is_admissible() {
    let s = standard_triple::<f64>(2).unwrap();
    let r = s.triple.check(&points(1, 10, 4, 2.0), 1e-4).unwrap();
    assert!(r.holds(1e-9), "{r:?}");
}

#[test]
fn dj_recovery_on_the_deformed_triple() {
    let d = deformed_structures(1, 0.3).unwrap();
    let pts = points(2, 10, 2, 1.0);
    let (_, fit) = dj_recovery(&d.metric(), &d.complex_structure(), &d.liouville(), &pts, 1e-4).unwrap();
    assert!((fit.constant + 2.0).abs() < 1e-4, "{fit:?}");
}

#[test]
fn liouville_field_preserves_linear_tensors() {
    let mut rng = random::rng_from_seed(3);
    let delta = VectorField::linear(Matrix::<f64>::identity(4));
    let a = random::matrix::<f64>(&mut rng, 4, 4);
    let b = random::matrix::<f64>(&mut rng, 4, 4);
    let (xa, ta) = linear_objects(&a).unwrap();
    let (_, tb) = linear_objects(&b).unwrap();
    let comm = Matrix::commutator(&a, &b).unwrap();
    for x in points(4, 10, 4, 1.0) {
        assert!(lie_derivative_at(&delta, &ta, &x, LIE_STEP).unwrap().max_abs() < 1e-8);
        let l = lie_derivative_at(&xa, &tb, &x, LIE_STEP).unwrap();
        assert!(l.max_abs_diff(&comm.scale(-1.0)) < 1e-8);
    }
}

#[test]
fn oscillator_flow_conserves_energy_and_symplectic_coefficient() {
    let gamma = oscillator_field::<f64>(1);
    let h = oscillator_hamiltonian::<f64>(1);
    for x in points(5, 10, 2, 1.5) {
        let y = flow(&gamma, &x, 2.0, 1e-3).unwrap();
        assert!((h.eval(&x).unwrap() - h.eval(&y).unwrap()).abs() < 1e-10);
        let (c0, c1) = (symplectic_coefficient(x[0], x[1], 0.3), symplectic_coefficient(y[0], y[1], 0.3));
        assert!((c0 - c1).abs() < 1e-9);
    }
}

#[test]
fn hermitian_bracket_splits_into_metric_and_poisson_parts() {
    let d = deformed_structures(2, 0.2).unwrap();
    let f = |x: &[f64]| Ok(x[0] * x[3] + x[1].sin());
    let h = |x: &[f64]| Ok(x[2] * x[2] - x[0] * x[1]);
    let (fr, hr) = (ScalarField::new(4, f), ScalarField::new(4, h));
    let lift = |g: fn(&[f64]) -> biham_core::Result<f64>| ComplexScalarField::new(4, move |x: &[f64]| Ok(Complex64::new(g(x)?, 0.0)));
    let b = hermitian_bracket(&lift(f), &lift(h), &BracketContext::deformed(&d)).unwrap();
    let poisson = d.poisson_bracket(&fr, &hr);
    let inv = d.inverse_metric();
    for x in points(6, 10, 4, 1.0) {
        let gf = gradient(|y| fr.eval(y), &x, 1e-6).unwrap();
        let gh = gradient(|y| hr.eval(y), &x, 1e-6).unwrap();
        let sym: f64 = inv.eval(&x).unwrap().mul_vec(&gh).unwrap().iter().zip(&gf).map(|(a, b)| a * b).sum();
        let v = b.eval(&x).unwrap();
        let anti = poisson.eval(&x).unwrap();
        assert!((v.re - sym).abs() < 1e-6 && (v.im - anti).abs() < 1e-6, "{v} {sym} {anti}");
    }
}

#[test]
fn bracket_identity_holds_only_without_deformation() {
    let pts = points(7, 30, 4, 1.0);
    let flat = bracket_comparison(&pts, 0.0).unwrap();
    assert!(flat.darboux_max_defect < 1e-6 && flat.deformed_max_defect < 1e-6, "{flat:?}");
    let bent = bracket_comparison(&pts, 0.1).unwrap();
    assert!(bent.deformed_max_defect > 1e-3);
}

#[test]
fn polynomial_family_matches_its_ode() {
    let fam: Family = "1,0.5,0.25".parse().unwrap();
    let sol = fam.solution::<f64>();
    for s in [0.1, 0.7, 2.0, 3.5] {
        assert!(sol.ode_residual(s, 1e-4).unwrap() < 1e-6);
    }
    assert_eq!(sol.eval(0.0).unwrap(), 0.0);
}

#[test]
fn single_precision_chart_and_structures() {
    let x = [0.6f32, -0.3, 0.2, 0.9];
    let y = lambda_chart(&x, 0.4f32).unwrap();
    let back = inverse_lambda_chart(&y, 0.4f32).unwrap();
    assert!(x.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-5));
    let d = deformed_structures(2, 0.4f32).unwrap();
    let r = d.triple().check(&[x.to_vec()], 1e-2).unwrap();
    assert!(r.compatibility < 1e-5 && r.complex_structure < 1e-5 && r.metric_positive, "{r:?}");
}
