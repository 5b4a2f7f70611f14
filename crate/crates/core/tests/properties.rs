use approx::assert_abs_diff_eq;
use liouville_core::io::{parse_model, TrajectoryRecord};
use liouville_core::random;
use liouville_core::{
    analyze, apply_kraus, channel_superop, channels_equal, expectation, hs_inner, kraus_from_superop,
    lindblad_liouvillian, mho, mho_inv, propagate, propagate_expm_oracle, steady_state, triple_superop,
    AnalyzeOptions, DensityMatrix, Error, KrausSet, Operator, TlsParams, C64,
};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn max_diff(a: &Operator, b: &Operator) -> f64 {
    (a - b).max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triple_product_and_round_trip(seed in any::<u64>(), d in 1usize..5) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random::complex_operator(&mut rng, d);
        let b = random::complex_operator(&mut rng, d);
        let c = random::complex_operator(&mut rng, d);
        let lhs = mho(&(&(&a * &b) * &c));
        let rhs = triple_superop(&a, &c).unwrap().apply(&mho(&b)).unwrap();
        prop_assert!((&lhs - &rhs).max_abs() <= 1e-12 * (1.0 + a.max_abs() * b.max_abs() * c.max_abs() * (d * d) as f64));
        prop_assert_eq!(mho_inv(&mho(&b)).unwrap(), b);
    }

    #[test]
    fn inner_products_match_traces(seed in any::<u64>(), d in 1usize..5) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random::complex_operator(&mut rng, d);
        let b = random::hermitian(&mut rng, d);
        let rho = random::density_matrix(&mut rng, d);
        let inner = mho(&a).inner(&mho(&b)).unwrap();
        prop_assert!((inner - hs_inner(&a, &b).unwrap()).norm() < 1e-12);
        let ev = mho(rho.operator()).inner(&mho(&b)).unwrap();
        prop_assert!((ev - expectation(&rho, &b).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn random_channels_survive_extraction(seed in any::<u64>(), d in 1usize..4, count in 1usize..5) {
        let mut rng = StdRng::seed_from_u64(seed);
        let set = KrausSet::new(random::kraus_ops(&mut rng, d, count)).unwrap();
        let s = channel_superop(&set);
        let extracted = kraus_from_superop(&s, None).unwrap();
        prop_assert!(extracted.len() <= (d * d).min(count));
        prop_assert!(channels_equal(&s, &channel_superop(&extracted), 1e-10).unwrap());
        let rho = random::density_matrix(&mut rng, d);
        let a = apply_kraus(&set, &rho).unwrap();
        let b = apply_kraus(&extracted, &rho).unwrap();
        prop_assert!(max_diff(a.operator(), b.operator()) < 1e-10);
    }

    #[test]
    fn spectral_propagation_matches_expm(seed in any::<u64>(), d in 2usize..4) {
        let mut rng = StdRng::seed_from_u64(seed);
        let model = random::lindblad_model(&mut rng, d, 2);
        let l = lindblad_liouvillian(&model).unwrap();
        let rho0 = random::density_matrix(&mut rng, d);
        let times = [0.0, 0.3, 2.0];
        let tr = propagate(&l, &rho0, &times).unwrap();
        for (t, s) in times.iter().zip(&tr.states) {
            let oracle = propagate_expm_oracle(&l, &rho0, *t).unwrap();
            prop_assert!(max_diff(s.operator(), oracle.operator()) < 1e-9);
        }
    }
}

#[test]
fn tls_relaxes_to_its_steady_state() {
    let params = TlsParams::new(1.0, 0.8, 0.3).unwrap();
    let l = params.full_generator();
    let sys = analyze(&l, &AnalyzeOptions::default()).unwrap();
    let rho = steady_state(&sys).unwrap();
    let (ground, excited) = params.equilibrium_populations();
    assert_abs_diff_eq!(rho.operator().get(0, 0).re, excited, epsilon = 1e-10);
    assert_abs_diff_eq!(rho.operator().get(1, 1).re, ground, epsilon = 1e-10);

    let late = propagate(
        &l,
        &DensityMatrix::basis_state(2, 1).unwrap(),
        &[60.0 / params.gamma()],
    )
    .unwrap();
    assert!(max_diff(late.states[0].operator(), rho.operator()) < 1e-8);
}

#[test]
fn isolated_model_reports_its_stationary_subspace() {
    let h = Operator::diagonal(&[C64::new(0.5, 0.0), C64::new(-0.5, 0.0), C64::new(1.5, 0.0)]).unwrap();
    let l = liouville_core::unitary_liouvillian(&h).unwrap();
    let sys = analyze(&l, &AnalyzeOptions::default()).unwrap();
    match steady_state(&sys) {
        Err(Error::NonUniqueSteadyState { basis }) => assert_eq!(basis.len(), 3),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn model_document_drives_a_trajectory_table() {
    let text = include_str!("../fixtures/tls_demo.json");
    let spec = parse_model(text).unwrap();
    let tr = propagate(&spec.liouvillian().unwrap(), &spec.initial_state, &spec.times).unwrap();
    let rec = TrajectoryRecord::from_trajectory(&tr, &spec.options.outputs).unwrap();
    let traces = rec.column("trace").unwrap();
    assert!(traces.iter().all(|t| (t - 1.0).abs() < 1e-12));
    let sz = rec.column("sigma_z_re").unwrap();
    assert_abs_diff_eq!(sz[0], 1.0, epsilon = 1e-14);
    // rates 1.5 down and 0.5 up relax <sigma_z> towards -1/2
    assert_abs_diff_eq!(*sz.last().unwrap(), -0.5, epsilon = 1e-3);
}
