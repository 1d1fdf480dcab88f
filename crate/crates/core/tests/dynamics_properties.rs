use hualab_core::dynamics::{
    config_from_esp, esp_closed_form, integrate_frozen, integrate_jacobi_type, jacobi_type_stationary, EspState,
    IntegratorConfig,
};
use hualab_core::model::elementary_symmetric_all;
use hualab_core::pseudojacobi::pseudo_jacobi_zeros;
use hualab_core::{Configuration, ModelParams};
use proptest::prelude::*;

fn ordered(mut x: Vec<f64>, gap: f64) -> Option<Vec<f64>> {
    x.sort_by(f64::total_cmp);
    x.windows(2).all(|w| w[1] - w[0] >= gap).then_some(x)
}

fn sup_distance(x: &[f64], z: &[f64]) -> f64 {
    x.iter().zip(z).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn steps_stay_ordered(
        raw in prop::collection::vec(-4.0f64..4.0, 2..=6),
        a in -0.4f64..3.0,
        b in -2.0f64..2.0,
    ) {
        let Some(x0) = ordered(raw, 1e-2) else { return Ok(()) };
        let p = ModelParams::frozen(x0.len(), a, b).unwrap();
        let traj = integrate_frozen(&Configuration::new(x0), &p, &IntegratorConfig::until(2.0)).unwrap();
        prop_assert!(traj.states.iter().skip(1).all(|s| s.is_ordered(true)));
    }

    #[test]
    fn symmetric_functions_follow_the_exact_cascade(
        raw in prop::collection::vec(-3.0f64..3.0, 1..=6),
        a in 0.2f64..2.0,
        b in -1.0f64..1.0,
        t in 0.1f64..10.0,
    ) {
        let Some(x0) = ordered(raw, 1e-2) else { return Ok(()) };
        let p = ModelParams::frozen(x0.len(), a, b).unwrap();
        let c0 = Configuration::new(x0);
        let cfg = IntegratorConfig { local_tol: 1e-12, ..IntegratorConfig::until(t) };
        let traj = integrate_frozen(&c0, &p, &cfg).unwrap();
        let y = elementary_symmetric_all(traj.states.last().unwrap().as_slice());
        let exact = esp_closed_form(&EspState::from_config(&c0, p).unwrap(), t).unwrap();
        for (u, v) in y[1..].iter().zip(&exact) {
            prop_assert!((u - v).abs() <= 1e-7 * (1.0 + v.abs()), "{} vs {}", u, v);
        }
    }

    #[test]
    fn esp_round_trip(raw in prop::collection::vec(-3.0f64..3.0, 1..=6)) {
        let Some(x) = ordered(raw, 0.05) else { return Ok(()) };
        let p = ModelParams::frozen(x.len(), 1.0, 0.0).unwrap();
        let back = config_from_esp(&EspState::from_config(&Configuration::new(x.clone()), p).unwrap()).unwrap();
        prop_assert!(sup_distance(&back.coords, &x) < 1e-10, "{:?} vs {:?}", back.coords, x);
    }

    #[test]
    fn symmetry_without_explicit_symmetrisation(half in prop::collection::vec(0.1f64..3.0, 1..=3), a in 0.2f64..2.0) {
        let Some(h) = ordered(half, 1e-2) else { return Ok(()) };
        let mut x0: Vec<f64> = h.iter().rev().map(|v| -v).collect();
        x0.extend(h.iter());
        let n = x0.len();
        let p = ModelParams::frozen(n, a, 0.0).unwrap();
        let traj = integrate_frozen(&Configuration::new(x0), &p, &IntegratorConfig::until(3.0)).unwrap();
        for s in &traj.states {
            for j in 0..n {
                prop_assert!((s.coords[j] + s.coords[n - 1 - j]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn attraction_is_eventually_monotone() {
    let p = ModelParams::frozen(4, 1.5, -0.5).unwrap();
    let z = pseudo_jacobi_zeros(4, p.stationary_pj_a(), p.b).unwrap();
    let cfg = IntegratorConfig { record_every: 1, ..IntegratorConfig::until(30.0) };
    let traj = integrate_frozen(&Configuration::new(vec![-3.0, -0.1, 0.4, 5.0]), &p, &cfg).unwrap();
    let d: Vec<f64> = traj.states.iter().map(|s| sup_distance(&s.coords, &z.zeros)).collect();
    let late = traj.times.iter().position(|t| *t >= 5.0).unwrap();
    // below ~1e-8 the distance sits at the integrator's error floor
    let tail: Vec<f64> = d[late..].iter().copied().take_while(|v| *v > 1e-8).collect();
    assert!(tail.len() > 5);
    assert!(tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));
    assert!(d[d.len() - 1] < 1e-6);
}

#[test]
fn negative_a_is_not_attracting() {
    // for a < 0 the first mode y_1 = Σ x_j has rate -2a > 0, so |y_1| grows
    for a in [-0.3, -0.1] {
        let p = ModelParams::frozen(3, a, 0.0).unwrap();
        let cfg = IntegratorConfig { record_every: 1, ..IntegratorConfig::until(4.0) };
        let traj = integrate_frozen(&Configuration::new(vec![-1.0, 0.2, 1.3]), &p, &cfg).unwrap();
        let y1: Vec<f64> = traj.states.iter().map(|s| s.coords.iter().sum::<f64>().abs()).collect();
        assert!(y1.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)), "a={a}");
        assert!(y1[y1.len() - 1] > y1[0] * 1.5);
    }
}

#[test]
fn symmetric_starts_converge_for_small_negative_a() {
    for a in [-0.4, -0.2, 0.0] {
        let p = ModelParams::frozen(4, a, 0.0).unwrap();
        let cfg = IntegratorConfig { symmetrize: true, record_every: usize::MAX, ..IntegratorConfig::until(120.0) };
        let ends: Vec<Configuration> = [vec![-2.0, -0.3, 0.3, 2.0], vec![-0.5, -0.2, 0.2, 0.5]]
            .into_iter()
            .map(|x0| integrate_frozen(&Configuration::new(x0), &p, &cfg).unwrap().states.last().unwrap().clone())
            .collect();
        let d = sup_distance(&ends[0].coords, &ends[1].coords);
        assert!(d < 1e-6, "a={a}: {d:e}");
        let rhs = hualab_core::dynamics::frozen_rhs(&ends[0], &p).unwrap();
        assert!(rhs.iter().all(|r| r.abs() < 1e-6), "a={a}: {rhs:?}");
    }
}

#[test]
fn jacobi_type_attraction() {
    let mut rng = hualab_core::rng::stream(11, 0);
    use rand::Rng;
    for n in [2usize, 3, 5] {
        let q = n as f64 - 1.0 + 0.7;
        let p = -q - 1.2;
        let z = jacobi_type_stationary(n, p, q).unwrap();
        for _ in 0..3 {
            let x0 = loop {
                let raw: Vec<f64> = (0..n).map(|_| rng.random_range(1.05..6.0)).collect();
                if let Some(x) = ordered(raw, 0.05) {
                    break x;
                }
            };
            let cfg = IntegratorConfig { record_every: usize::MAX, ..IntegratorConfig::until(40.0) };
            let traj = integrate_jacobi_type(&x0, p, q, &cfg).unwrap();
            let d = sup_distance(&traj.states.last().unwrap().coords, &z);
            assert!(d < 1e-6, "N={n} from {x0:?}: {d:e}");
        }
    }
}
