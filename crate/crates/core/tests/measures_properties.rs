use hualab_core::dynamics::{simulate_sde, SdeRunConfig};
use hualab_core::measures::{mh_sample, HuaPickrellMeasure, MhConfig};
use hualab_core::quadrature::real_line;
use hualab_core::spectral_stats::mc_freezing_test;
use hualab_core::{BetaParam, Configuration, ModelParams};

fn target(n: usize, a: f64, b: f64, beta: f64) -> HuaPickrellMeasure {
    HuaPickrellMeasure::new(ModelParams::new(n, a, b, BetaParam::finite(beta).unwrap()).unwrap()).unwrap()
}

/// Mean and batch-means standard error.
fn mean_se(v: &[f64], batches: usize) -> (f64, f64) {
    let size = v.len() / batches;
    let bm: Vec<f64> = (0..batches).map(|k| v[k * size..(k + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let mean = bm.iter().sum::<f64>() / batches as f64;
    let var = bm.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (mean, (var / batches as f64).sqrt())
}

#[test]
fn densities_integrate_to_one() {
    let one = target(1, 0.6, -0.8, 3.0);
    let mass = real_line(|x| one.log_density(&Configuration::new(vec![x])).exp(), 1e-12);
    assert!((mass - 1.0).abs() < 1e-6, "{mass}");

    // the symmetrised two-particle density over the whole plane has mass 2
    let two = target(2, 1.0, 0.5, 2.0);
    let f = |x: f64, y: f64| {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        if lo == hi {
            return 0.0;
        }
        two.log_density(&Configuration::new(vec![lo, hi])).exp()
    };
    let mass = real_line(|x| real_line(|y| f(x, y), 1e-11), 1e-10) / 2.0;
    assert!((mass - 1.0).abs() < 1e-6, "{mass}");
}

#[test]
fn flip_invariance() {
    let p = target(3, 0.8, 0.7, 2.0);
    let q = target(3, 0.8, -0.7, 2.0);
    let x = Configuration::new(vec![-1.3, 0.2, 2.5]);
    assert!((p.log_density(&x) - q.log_density(&x.reflected())).abs() < 1e-12);

    let run = |t: &HuaPickrellMeasure| {
        let mut cfg = MhConfig::for_target(t, 60_000, 2_000, 5, 3);
        cfg.n_chains = 4;
        mh_sample(t, &cfg).unwrap()
    };
    let (rp, rq) = (run(&p), run(&q));
    for j in 0..3 {
        let u: Vec<f64> = rp.samples.iter().map(|s| s.coords[j].atan()).collect();
        let v: Vec<f64> = rq.samples.iter().map(|s| -s.coords[2 - j].atan()).collect();
        let ((mu, su), (mv, sv)) = (mean_se(&u, 40), mean_se(&v, 40));
        assert!((mu - mv).abs() < 3.0 * (su * su + sv * sv).sqrt(), "j={j}: {mu} ± {su} vs {mv} ± {sv}");
    }
}

#[test]
fn freezing_covariance_stabilises() {
    let r = mc_freezing_test(2, 1.0, 0.3, &[1e2, 1e3, 1e4], 40_000, 12).unwrap();
    assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    assert!(r.trend_ok(), "{:?}", r.rel_errors);
    assert!(r.rel_errors[2] < 0.1, "{:?}", r.rel_errors);
}

/// Bounded observables of a two-particle state: the mean position, the mean
/// of `1/(1+x²)` and the product `x_1 x_2 / ((1+x_1²)(1+x_2²))`.
fn observables(x: &[f64]) -> [f64; 3] {
    let w: Vec<f64> = x.iter().map(|v| 1.0 / (1.0 + v * v)).collect();
    [(x[0] + x[1]) / 2.0, (w[0] + w[1]) / 2.0, x[0] * x[1] * w[0] * w[1]]
}

#[test]
fn diffusion_time_averages_match_invariant_law() {
    let t = target(2, 1.0, 0.0, 2.0);
    let mut cfg = SdeRunConfig::new(1_000.0, 5e-4, 99);
    cfg.integrator.record_every = 20;
    let traj = simulate_sde(&Configuration::new(vec![-0.5, 0.5]), &t.params, &cfg).unwrap().remove(0);
    let sde: Vec<[f64; 3]> = traj
        .times
        .iter()
        .zip(&traj.states)
        .filter(|(time, _)| **time > 20.0)
        .map(|(_, s)| observables(&s.coords))
        .collect();

    let mut mcfg = MhConfig::for_target(&t, 250_000, 5_000, 5, 7);
    mcfg.n_chains = 4;
    let mh = mh_sample(&t, &mcfg).unwrap();
    let mh: Vec<[f64; 3]> = mh.samples.iter().map(|s| observables(&s.coords)).collect();

    for k in 0..3 {
        let (ms, ss) = mean_se(&sde.iter().map(|o| o[k]).collect::<Vec<_>>(), 50);
        let (mm, sm) = mean_se(&mh.iter().map(|o| o[k]).collect::<Vec<_>>(), 50);
        assert!((ms - mm).abs() < 3.0 * (ss * ss + sm * sm).sqrt(), "observable {k}: {ms} ± {ss} vs {mm} ± {sm}");
    }
}
