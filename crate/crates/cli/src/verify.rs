use anyhow::Result;
use clap::ValueEnum;
use hualab_core::dynamics::{
    esp_closed_form, frozen_fd_residual, heat_residual, heat_rhs_at, heckman_to_hp_transform, integrate_frozen,
    integrate_heckman, squared_transform_residual, EspState, IntegratorConfig,
};
use hualab_core::measures::{
    measure_distance, EmpiricalMeasure, EquilibriumMeasure, HuaPickrellMeasure, CAUCHY_CONSTANT_SIGN,
};
use hualab_core::model::{elementary_symmetric_all, stieltjes_power_identity_residual, symmetric_identity_residuals};
use hualab_core::pseudojacobi::{electrostatic_residual, pseudo_jacobi_zeros, zero_map_check};
use hualab_core::quadrature::real_line;
use hualab_core::spectral_stats::{integrate_moments, MomentSequence};
use hualab_core::{rng, BetaParam, Configuration, ModelParams};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::output::{checks_csv, Check, OutDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Transforms,
    Heat,
    Measure,
    All,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Random configurations for the identity suite.
    #[arg(long, default_value_t = 1000)]
    pub configs: usize,
}

/// Ordered points in `[-w, w]` with all gaps at least `1e-3`.
pub fn random_configuration<R: Rng>(rng: &mut R, n: usize, w: f64) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-w..w)).collect();
        x.sort_by(f64::total_cmp);
        if x.windows(2).all(|w| w[1] - w[0] >= 1e-3) {
            return x;
        }
    }
}

fn identities(args: &Args, seed: u64, checks: &mut Vec<Check>) -> Result<()> {
    const S: &str = "identities";
    let mut rng = rng::stream(seed, 0);
    let (mut sym, mut power) = (0.0f64, 0.0f64);
    for i in 0..args.configs {
        let x = random_configuration(&mut rng, 2 + i % 7, 10.0);
        sym = sym.max(symmetric_identity_residuals(&x)?.max());
        for m in 0..=6 {
            power = power.max(stieltjes_power_identity_residual(&x, m)?);
        }
    }
    checks.push(Check::below(S, "elementary-symmetric identities", sym, 1e-10));
    checks.push(Check::below(S, "power-sum identity", power, 1e-10));

    // the frozen flow carried to symmetric functions matches the exact cascade
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        let params = ModelParams::frozen(n, 1.0, 0.5)?;
        let x0 = Configuration::new(random_configuration(&mut rng, n, 3.0));
        let s0 = EspState::from_config(&x0, params)?;
        for t in [0.5, 2.0, 10.0] {
            let cfg = IntegratorConfig { local_tol: 1e-12, ..IntegratorConfig::until(t) };
            let traj = integrate_frozen(&x0, &params, &cfg)?;
            let y = elementary_symmetric_all(traj.states.last().expect("non-empty").as_slice());
            let exact = esp_closed_form(&s0, t)?;
            for (u, v) in y[1..].iter().zip(&exact) {
                worst = worst.max((u - v).abs() / (1.0 + v.abs()));
            }
        }
    }
    checks.push(Check::below(S, "symmetric functions vs frozen flow", worst, 1e-7));

    let z = pseudo_jacobi_zeros(2, -3.0, 0.0)?;
    let r = 3f64.sqrt().recip();
    checks.push(Check::below(S, "P_2(.;-3,0) zeros = ±3^-1/2", (z.zeros[0] + r).abs().max((z.zeros[1] - r).abs()), 1e-10));
    for (n, a, b) in [(5usize, -8.0, 1.0), (8, -10.5, -1.0), (12, -20.0, 2.5)] {
        let z = pseudo_jacobi_zeros(n, a, b)?;
        checks.push(Check::below(S, format!("electrostatic residual N={n} a={a} b={b}"), electrostatic_residual(&z.zeros, a, b)?, 1e-9));
    }
    Ok(())
}

fn transforms(checks: &mut Vec<Check>) -> Result<()> {
    const S: &str = "transforms";
    for y0 in [vec![0.25, 4.0], vec![0.2, 1.0, 5.0], vec![0.1, 0.5, 2.0, 10.0]] {
        let n = y0.len();
        let cfg = IntegratorConfig { local_tol: 1e-12, dt_max: 4e-4, ..IntegratorConfig::until(0.4) };
        let x = heckman_to_hp_transform(&integrate_heckman(&y0, &cfg)?)?;
        checks.push(Check::below(S, format!("Heckman image solves frozen flow N={n}"), frozen_fd_residual(&x)?, 1e-5));
    }
    for n in 4..=7 {
        let p = ModelParams::frozen(n, 0.6, 0.0)?;
        let x0: Vec<f64> = (0..n).map(|j| -2.0 + 4.0 * j as f64 / (n - 1) as f64).collect();
        let cfg = IntegratorConfig { symmetrize: true, dt_max: 1e-4, local_tol: 1e-12, ..IntegratorConfig::until(1.0) };
        let traj = integrate_frozen(&Configuration::new(x0), &p, &cfg)?;
        checks.push(Check::below(S, format!("squared coordinates N={n}"), squared_transform_residual(&traj)?, 1e-5));
    }
    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        for a in [0.5, 1.0, 2.0] {
            worst = worst.max(zero_map_check(n, a)?);
        }
    }
    checks.push(Check::below(S, "zero mapping to Jacobi zeros, N <= 8", worst, 1e-8));
    Ok(())
}

fn heat(out: &mut OutDir, checks: &mut Vec<Check>) -> Result<()> {
    const S: &str = "heat";
    let probes = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let p = ModelParams::frozen(3, 1.0, 0.5)?;
    let cfg = IntegratorConfig { dt_max: 1e-4, local_tol: 1e-12, ..IntegratorConfig::until(0.5) };
    let traj = integrate_frozen(&Configuration::new(vec![-1.5, 0.0, 2.0]), &p, &cfg)?;
    let r = heat_residual(&traj, &probes, &p)?;
    let rows: Vec<Vec<f64>> = r.times.iter().zip(&r.residuals).map(|(t, v)| vec![*t, *v]).collect();
    out.write_csv("heat.csv", &["t", "residual"], &rows)?;
    checks.push(Check::below(S, "moving trajectory N=3 a=1 b=0.5", r.max, 1e-5));
    let z = pseudo_jacobi_zeros(3, p.stationary_pj_a(), p.b)?;
    let stat = probes.iter().map(|u| heat_rhs_at(&z.zeros, &p, *u).abs()).fold(0.0, f64::max);
    checks.push(Check::below(S, "stationary state", stat, 1e-10));
    Ok(())
}

fn measure(checks: &mut Vec<Check>) -> Result<()> {
    const S: &str = "measure";
    let probes = [Complex64::new(0.0, 2.0), Complex64::new(0.0, 5.0), Complex64::new(3.0, 4.0)];
    for (a_hat, b_hat) in [(1.0, 0.0), (0.5, 0.5)] {
        let e = EquilibriumMeasure::new(a_hat, b_hat)?;
        let sigma = e.resolve_quadratic_sign()?;
        checks.push(Check::flag(S, format!("sign resolved at large z (a_hat={a_hat})"), sigma == CAUCHY_CONSTANT_SIGN));
        let mut good: f64 = 0.0;
        let mut bad = f64::INFINITY;
        for z in probes {
            good = good.max(e.quadratic_residual_with_sign(z, sigma)?);
            bad = bad.min(e.quadratic_residual_with_sign(z, -sigma)?);
        }
        checks.push(Check::below(S, format!("Cauchy quadratic a_hat={a_hat} b_hat={b_hat}"), good, 1e-6));
        checks.push(Check::above(S, format!("counterfactual sign a_hat={a_hat} b_hat={b_hat}"), bad, 0.1));
    }

    let n = 200;
    let z = pseudo_jacobi_zeros(n, -2.0 * n as f64, 0.0)?;
    let e = EquilibriumMeasure::new(1.0, 0.0)?;
    let d = measure_distance(&EmpiricalMeasure::new(z.zeros)?, &e);
    checks.push(Check::below(S, "zeros N=200 cdf gap", d.cdf_sup_gap, 0.05));

    let mut worst: f64 = 0.0;
    for a_hat in [0.5, 1.0, 2.0] {
        for b_hat in [0.0, 0.5] {
            let m = integrate_moments(&MomentSequence::delta(8), a_hat, b_hat, 60.0)?;
            let e = EquilibriumMeasure::new(a_hat, b_hat)?;
            for k in 0..=8 {
                let want = e.moment(k as u32);
                worst = worst.max((m.values[k] - want).abs() / (1.0 + want.abs()));
            }
        }
    }
    checks.push(Check::below(S, "moment flow limit vs quadrature, n <= 8", worst, 1e-5));
    let analytic = (e.moment(2) - 0.5).abs().max((e.moment(0) - 1.0).abs()).max((e.x_plus - 3f64.sqrt()).abs());
    checks.push(Check::below(S, "a_hat=1 analytic values", analytic, 1e-5));

    let hp = HuaPickrellMeasure::new(ModelParams::new(1, 1.0, 0.5, BetaParam::finite(2.0)?)?)?;
    let mass = real_line(|x| hp.log_density(&Configuration::new(vec![x])).exp(), 1e-12);
    checks.push(Check::below(S, "one-particle normalisation", (mass - 1.0).abs(), 1e-8));
    Ok(())
}

pub fn run(args: Args, mut out: OutDir, seed: u64) -> Result<bool> {
    let mut checks = Vec::new();
    let all = args.suite == Suite::All;
    if all || args.suite == Suite::Identities {
        identities(&args, seed, &mut checks)?;
    }
    if all || args.suite == Suite::Transforms {
        transforms(&mut checks)?;
    }
    if all || args.suite == Suite::Heat {
        heat(&mut out, &mut checks)?;
    }
    if all || args.suite == Suite::Measure {
        measure(&mut checks)?;
    }
    for c in &checks {
        println!("{} {:<6} {}: {:e} (tolerance {:e})", if c.pass { "pass" } else { "FAIL" }, c.suite, c.name, c.value, c.tolerance);
    }
    checks_csv(&mut out, &checks)?;
    out.finish("verify", serde_json::to_value(&args)?, seed, checks)
}
