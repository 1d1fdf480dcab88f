use hualab_core::measures::EquilibriumMeasure;
use hualab_core::spectral_stats::{
    build_covariances, cauchy_pde_residual, clt_eigenvalues, default_probes, det_s_closed_form,
    eigenvector_structure_check, integrate_moments, integrate_moments_path, MomentSequence,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectrum_ignores_b(n in 1usize..=9, a in 0.2f64..5.0, b in -3.0f64..3.0) {
        let cs = build_covariances(n, a, b).unwrap();
        for (got, want) in cs.eigenvalues.iter().zip(clt_eigenvalues(n, a)) {
            prop_assert!((got - want).abs() <= 1e-8 * want);
        }
        prop_assert!(cs.eigenvalues[0] > 0.0);
        prop_assert!(cs.sigma.clone().cholesky().is_some());
        prop_assert!(eigenvector_structure_check(&cs).unwrap() < 1e-8);
        let want = det_s_closed_form(n, a, b);
        prop_assert!(((cs.det_s() - want) / want).abs() < 1e-8);
    }

    #[test]
    fn carleman_bound_on_delta_starts(a_hat in 0.1f64..3.0, b_hat in -1.0f64..1.0) {
        let path = integrate_moments_path(&MomentSequence::delta(10), a_hat, b_hat, 3.0, 50).unwrap();
        prop_assert!(path.iter().all(|m| m.satisfies_carleman(a_hat, b_hat, 0.0)));
    }
}

#[test]
fn moment_flow_limit_is_the_equilibrium() {
    for a_hat in [0.5, 1.0, 2.0] {
        for b_hat in [0.0, 0.5] {
            let e = EquilibriumMeasure::new(a_hat, b_hat).unwrap();
            let m = integrate_moments(&MomentSequence::uniform(8), a_hat, b_hat, 60.0).unwrap();
            for n in 0..=8 {
                let want = e.moment(n as u32);
                assert!((m.values[n] - want).abs() < 1e-5 * (1.0 + want.abs()), "â={a_hat} b̂={b_hat} n={n}");
            }
        }
    }
}

#[test]
fn cauchy_pde_along_transient() {
    let path = integrate_moments_path(&MomentSequence::uniform(40), 1.0, 0.5, 2.0, 100).unwrap();
    let r = cauchy_pde_residual(&path, 1.0, 0.5, &default_probes(), 40).unwrap();
    assert!(r < 1e-6, "{r:e}");
}
