use biham_core::defalg::{compare_s_and_s_k, derivation_check, subalgebra_s, AdjointPair, DeformedAlgebra};
use biham_core::hermpair::{commutant, genericity_report, HermitianForm, Tolerances};
use biham_core::qalg::{complex_counterpart, matrix_to_json, parse_matrix, Matrix};
use biham_core::{random, CMatrix, FieldKind, QMatrix, Quat, Scalar, C64};
use proptest::prelude::*;

fn rel<S: Scalar<Real = f64>>(a: &Matrix<S>, b: &Matrix<S>) -> f64 {
    a.max_abs_diff(b) / a.max_abs().max(b.max_abs()).max(1.0)
}

fn laws<S: Scalar<Real = f64>>(seed: u64, n: usize) -> [f64; 4] {
    let mut rng = random::rng_from_seed(seed);
    let alg = DeformedAlgebra::new(random::near_identity::<S>(&mut rng, n, 0.3)).unwrap();
    let [a, b, c] = [0; 3].map(|_| random::matrix::<S>(&mut rng, n, n));
    let assoc = rel(&alg.product(&alg.product(&a, &b).unwrap(), &c).unwrap(), &alg.product(&a, &alg.product(&b, &c).unwrap()).unwrap());
    let iso = rel(&alg.phi(&(&a * &b)).unwrap(), &alg.product(&alg.phi(&a).unwrap(), &alg.phi(&b).unwrap()).unwrap());
    let round = rel(&alg.phi_inverse(&alg.phi(&a).unwrap()).unwrap(), &a);
    [assoc, alg.identity_defect(), iso, round]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deformed_product_laws(seed in any::<u64>(), n in 1usize..5) {
        for v in laws::<C64>(seed, n).into_iter().chain(laws::<Quat>(seed, n)) {
            prop_assert!(v < 1e-11, "{v}");
        }
    }

    #[test]
    fn star_is_an_involutive_antihomomorphism(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = random::rng_from_seed(seed);
        let spec: Vec<f64> = random::spectrum(&mut rng, n, false);
        let (h1, h2) = random::hermitian_pair::<Quat>(&mut rng, &spec);
        let pair = AdjointPair::from_forms(&h1, &h2).unwrap();
        let a = random::matrix::<Quat>(&mut rng, n, n);
        let b = random::matrix::<Quat>(&mut rng, n, n);
        prop_assert!(rel(&pair.star(&pair.star(&a)), &a) < 1e-10);
        prop_assert!(rel(&pair.star(&(&a * &b)), &(&pair.star(&b) * &pair.star(&a))) < 1e-10);
        prop_assert!(pair.contract_defect(&a) < 1e-10 * (1.0 + a.max_abs()));
    }

    #[test]
    fn derivation_defect_tracks_the_commutator(seed in any::<u64>()) {
        let mut rng = random::rng_from_seed(seed);
        let k = random::near_identity::<C64>(&mut rng, 3, 0.3);
        let h = random::hermitian::<C64>(&mut rng, 3);
        let d = derivation_check(&h, &k, 4, 1e-10, &mut rng).unwrap();
        prop_assert!(d.identity_residual < 1e-12);
        prop_assert_eq!(d.is_derivation, d.commutator_norm < 1e-10);
    }
}

#[test]
fn identity_pair_report() {
    let h1 = HermitianForm::<C64>::identity(2);
    let h2 = HermitianForm::new(CMatrix::from_real_diagonal(&[1.0, 2.0]), 1e-12).unwrap();
    let r = genericity_report(&h1, &h2, &Tolerances::default()).unwrap();
    assert_eq!(r.signature, vec![1, 1]);
    assert_eq!(r.group_label, "U(1)xU(1)");
    assert!(r.distinct_spectrum && r.cyclic && r.def3_holds && r.minimal && r.consistent);
    assert_eq!((r.commutant_real_dim, r.bicommutant_real_dim), (4, 4));
}

#[test]
fn quaternionic_report_breaks_the_bicommutant_test() {
    let h1 = HermitianForm::<Quat>::identity(3);
    let h2 = HermitianForm::new(QMatrix::from_real_diagonal(&[1.0, 2.0, 3.0]), 1e-12).unwrap();
    let r = genericity_report(&h1, &h2, &Tolerances::default()).unwrap();
    assert_eq!(r.field, FieldKind::Quaternionic);
    assert_eq!((r.commutant_real_dim, r.bicommutant_real_dim), (12, 3));
    assert!(r.cyclic && !r.def3_holds && r.consistent);
    assert_eq!(r.group_label, "U(1,Q)xU(1,Q)xU(1,Q)");
}

#[test]
fn scalar_connecting_operator_has_full_commutant() {
    // G = c I up to rounding must not be mistaken for a generic operator
    let mut rng = random::rng_from_seed(12);
    let (h1, h2) = random::hermitian_pair::<C64>(&mut rng, &[1.7, 1.7, 1.7]);
    let g = &h1.inverse().unwrap() * &h2;
    assert_eq!(commutant(&g, 1e-9).unwrap().real_dim, 18);
}

#[test]
fn s_and_s_k_agree_for_invertible_k() {
    let k = CMatrix::from_real_diagonal(&[1.0, 2.0]);
    assert_eq!(subalgebra_s(&k, false, 1e-9).unwrap().real_dim, 4);
    let cmp = compare_s_and_s_k(&k, 1e-9, 1e-8).unwrap();
    assert!(cmp.equal && cmp.dim_s_k == 4);
    // K with eigenvalues +1 and -1: K^2 = I, so S_K is everything
    let flip = CMatrix::from_real_diagonal(&[1.0, -1.0]);
    let cmp = compare_s_and_s_k(&flip, 1e-9, 1e-8).unwrap();
    assert!(!cmp.equal && cmp.dim_s == 4 && cmp.dim_s_k == 8);
}

#[test]
fn ill_conditioned_k_is_rejected() {
    let k = CMatrix::from_real_diagonal(&[1.0, 1e-10]);
    assert!(DeformedAlgebra::new(k).is_err());
}

#[test]
fn matrix_json_round_trip() {
    let mut rng = random::rng_from_seed(13);
    let m = random::matrix::<Quat>(&mut rng, 2, 3);
    let back: QMatrix = parse_matrix(&matrix_to_json(&m)).unwrap();
    assert_eq!(back, m);
    assert!(parse_matrix::<C64>(r#"{"rows": 1, "cols": 2, "entries": [1]}"#).is_err());
    assert!(parse_matrix::<C64>(r#"{"rows": 1, "cols": 1, "entries": [[1, 2, 3]]}"#).is_err());
}

#[test]
fn counterpart_is_multiplicative() {
    let mut rng = random::rng_from_seed(14);
    let a = random::matrix::<Quat>(&mut rng, 3, 3);
    let b = random::matrix::<Quat>(&mut rng, 3, 3);
    let lhs = complex_counterpart(&(&a * &b));
    let rhs = &complex_counterpart(&a) * &complex_counterpart(&b);
    assert!(lhs.max_abs_diff(&rhs) < 1e-12);
}

#[test]
fn single_precision_report() {
    let h1 = HermitianForm::<num_complex::Complex32>::identity(2);
    let h2 = HermitianForm::new(Matrix::from_real_diagonal(&[1.0f32, 2.0]), 1e-6).unwrap();
    let tol = Tolerances { hermitian: 1e-5, cluster: 1e-4, rank: 1e-5, null: 1e-4 };
    let r = genericity_report(&h1, &h2, &tol).unwrap();
    assert_eq!(r.signature, vec![1, 1]);
}
