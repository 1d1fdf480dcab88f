use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{collision_or_unordered, frozen_rhs_into, split_boundary_by, IntegratorConfig, BOUNDARY_SPLIT};
use crate::error::{Error, Result};
use crate::model::{is_ordered, Configuration, ModelParams, Trajectory};
use crate::rng;

/// Coordinates in which Euler–Maruyama steps are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    /// `x` itself, with multiplicative noise `2√((1+x²)/β)`.
    Original,
    /// `y = arsinh x`, where the noise is additive.
    #[default]
    Arsinh,
}

/// `Normalized` is the SDE as written; `PerParticle` divides drift and
/// diffusion variance by `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TimeScaling {
    #[default]
    Normalized,
    PerParticle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdeRunConfig {
    /// `dt_init` is the nominal step; `dt_min` bounds the bisection used
    /// when a step would leave the chamber. `local_tol` is ignored.
    pub integrator: IntegratorConfig,
    pub seed: u64,
    pub n_replicas: usize,
    pub chart: Chart,
    pub time_scaling: TimeScaling,
}

impl SdeRunConfig {
    pub fn new(t_end: f64, dt: f64, seed: u64) -> Self {
        Self {
            integrator: IntegratorConfig { dt_init: dt, dt_min: dt * 1e-20, ..IntegratorConfig::until(t_end) },
            seed,
            n_replicas: 1,
            chart: Chart::Arsinh,
            time_scaling: TimeScaling::Normalized,
        }
    }
}

struct Coefficients {
    a: f64,
    b: f64,
    inv_beta: f64,
    /// Multiplies drift and diffusion variance.
    speed: f64,
}

impl Coefficients {
    fn new(params: &ModelParams, scaling: TimeScaling) -> Result<Self> {
        let beta = params.beta.value().ok_or_else(|| {
            Error::OutOfRegime("the SDE needs finite beta; use the frozen integrator".into())
        })?;
        let speed = match scaling {
            TimeScaling::Normalized => 1.0,
            TimeScaling::PerParticle => 1.0 / params.n_particles as f64,
        };
        Ok(Self { a: params.a, b: params.b, inv_beta: 1.0 / beta, speed })
    }
}

fn arsinh_drift(y: &[f64], c: &Coefficients, out: &mut [f64]) -> Result<()> {
    let n = y.len();
    let lin = 1.0 - n as f64 - c.a - c.inv_beta;
    for (o, &yj) in out.iter_mut().zip(y) {
        *o = lin * yj.tanh() + c.b / yj.cosh();
    }
    // with u = e^y: tanh((y_j+y_k)/2) = (u_j u_k − 1)/(u_j u_k + 1) and
    // coth((y_j−y_k)/2) = (u_j+u_k)/(u_j−u_k), the latter only for
    // well-separated pairs where the difference does not cancel
    let u: Vec<f64> = y.iter().map(|v| v.exp()).collect();
    for j in 0..n {
        for k in (j + 1)..n {
            let d = y[j] - y[k];
            if !(d != 0.0) {
                return Err(Error::Collision { i: j, j: k, gap: d.abs() });
            }
            let coth = if d.abs() < 0.1 || !u[j].is_finite() { 1.0 / (0.5 * d).tanh() } else { (u[j] + u[k]) / (u[j] - u[k]) };
            let p = u[j] * u[k];
            let th = if p.is_finite() { (p - 1.0) / (p + 1.0) } else { 1.0 };
            out[j] += 0.5 * (coth + th);
            out[k] += 0.5 * (-coth + th);
        }
    }
    for o in out.iter_mut() {
        *o *= 2.0 * c.speed;
    }
    Ok(())
}

/// One Euler–Maruyama step of length `dt` with Brownian increments `dw`,
/// in the given chart. Input and output are in original coordinates.
pub fn euler_step(
    x: &[f64],
    params: &ModelParams,
    chart: Chart,
    scaling: TimeScaling,
    dt: f64,
    dw: &[f64],
) -> Result<Vec<f64>> {
    let c = Coefficients::new(params, scaling)?;
    let mut out = vec![0.0; x.len()];
    match chart {
        Chart::Original => {
            step_original(x, &c, dt, dw, &mut out)?;
            Ok(out)
        }
        Chart::Arsinh => {
            let y: Vec<f64> = x.iter().map(|v| v.asinh()).collect();
            step_arsinh(&y, &c, dt, dw, &mut out)?;
            Ok(out.iter().map(|v| v.sinh()).collect())
        }
    }
}

fn step_original(x: &[f64], c: &Coefficients, dt: f64, dw: &[f64], out: &mut [f64]) -> Result<()> {
    frozen_rhs_into(x, c.a, c.b, out)?;
    let sig = 2.0 * (c.inv_beta * c.speed).sqrt();
    for j in 0..x.len() {
        out[j] = x[j] + c.speed * out[j] * dt + sig * (1.0 + x[j] * x[j]).sqrt() * dw[j];
    }
    Ok(())
}

fn step_arsinh(y: &[f64], c: &Coefficients, dt: f64, dw: &[f64], out: &mut [f64]) -> Result<()> {
    arsinh_drift(y, c, out)?;
    let sig = 2.0 * (c.inv_beta * c.speed).sqrt();
    for j in 0..y.len() {
        out[j] = y[j] + out[j] * dt + sig * dw[j];
    }
    Ok(())
}

struct Stepper<'a> {
    c: &'a Coefficients,
    chart: Chart,
    dt_min: f64,
    buf: Vec<f64>,
}

impl Stepper<'_> {
    /// Advances `state` by `dt` with total Brownian increment `dw`. A step
    /// that leaves the chamber is split in two, with the midpoint increment
    /// drawn from the Brownian bridge.
    fn advance<R: Rng>(&mut self, state: &mut Vec<f64>, t: f64, dt: f64, dw: &[f64], rng: &mut R) -> Result<()> {
        let ok = match self.chart {
            Chart::Original => step_original(state, self.c, dt, dw, &mut self.buf),
            Chart::Arsinh => step_arsinh(state, self.c, dt, dw, &mut self.buf),
        };
        let ok = match ok {
            Ok(()) => self.buf.iter().all(|v| v.is_finite()) && is_ordered(&self.buf, true),
            Err(Error::Collision { .. }) => false,
            Err(e) => return Err(e),
        };
        if ok {
            state.copy_from_slice(&self.buf);
            return Ok(());
        }
        let half = 0.5 * dt;
        if half < self.dt_min {
            return Err(Error::Stiffness { t, dt: half, state: state.clone() });
        }
        let s = (0.25 * dt).sqrt();
        let first: Vec<f64> = dw.iter().map(|w| 0.5 * w + s * rng.sample::<f64, _>(StandardNormal)).collect();
        let second: Vec<f64> = dw.iter().zip(&first).map(|(w, f)| w - f).collect();
        self.advance(state, t, half, &first, rng)?;
        self.advance(state, t + half, half, &second, rng)
    }
}

fn run_replica(x0: &[f64], params: &ModelParams, cfg: &SdeRunConfig, index: u64) -> Result<Trajectory> {
    let c = Coefficients::new(params, cfg.time_scaling)?;
    let ic = &cfg.integrator;
    let mut rng = rng::stream(cfg.seed, index);
    let to_chart = |v: &[f64]| -> Vec<f64> {
        match cfg.chart {
            Chart::Original => v.to_vec(),
            Chart::Arsinh => v.iter().map(|u| u.asinh()).collect(),
        }
    };
    let from_chart = |v: &[f64]| -> Vec<f64> {
        match cfg.chart {
            Chart::Original => v.to_vec(),
            Chart::Arsinh => v.iter().map(|u| u.sinh()).collect(),
        }
    };
    // Coincident starts are split on the scale of one step's noise; a finer
    // split makes the first explicit step blow up.
    let split = BOUNDARY_SPLIT.max((ic.dt_init * c.inv_beta * c.speed).sqrt());
    let mut state = to_chart(&split_boundary_by(x0, split));
    let mut traj = Trajectory::new(*params, cfg.seed);
    traj.push(0.0, Configuration::new(x0.to_vec()));
    let mut stepper = Stepper { c: &c, chart: cfg.chart, dt_min: ic.dt_min, buf: vec![0.0; x0.len()] };
    let steps = (ic.t_end / ic.dt_init).ceil().max(1.0) as usize;
    let mut dw = vec![0.0; x0.len()];
    let mut t = 0.0;
    for k in 1..=steps {
        let t_next = if k == steps { ic.t_end } else { k as f64 * ic.dt_init };
        let dt = t_next - t;
        let sd = dt.sqrt();
        for w in dw.iter_mut() {
            *w = sd * rng.sample::<f64, _>(StandardNormal);
        }
        stepper.advance(&mut state, t, dt, &dw, &mut rng)?;
        t = t_next;
        if k % ic.record_every == 0 || k == steps {
            let x = from_chart(&state);
            if !is_ordered(&x, true) {
                // sinh can merge coordinates that are distinct in the chart
                return Err(collision_or_unordered(&x));
            }
            traj.push(t, Configuration::new(x));
        }
    }
    Ok(traj)
}

/// Euler–Maruyama paths of the finite-β SDE, one per replica. Replica `i`
/// draws from stream `i` of `cfg.seed`, so the output is independent of
/// thread scheduling.
pub fn simulate_sde(x0: &Configuration, params: &ModelParams, cfg: &SdeRunConfig) -> Result<Vec<Trajectory>> {
    if x0.len() != params.n_particles {
        return Err(Error::InvalidArgument("start length differs from N".into()));
    }
    if !x0.is_ordered(false) {
        return Err(Error::Unordered);
    }
    let ic = &cfg.integrator;
    if !(ic.dt_init > 0.0 && ic.t_end > 0.0 && ic.dt_min > 0.0) || ic.record_every == 0 {
        return Err(Error::InvalidArgument("dt, dt_min and t_end must be positive".into()));
    }
    if cfg.n_replicas == 0 {
        return Err(Error::InvalidArgument("need at least one replica".into()));
    }
    Coefficients::new(params, cfg.time_scaling)?;
    (0..cfg.n_replicas as u64)
        .into_par_iter()
        .map(|i| run_replica(x0.as_slice(), params, cfg, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::integrate_frozen;
    use crate::model::BetaParam;
    use approx::assert_relative_eq;

    fn params(n: usize, a: f64, b: f64, beta: f64) -> ModelParams {
        ModelParams::new(n, a, b, BetaParam::finite(beta).unwrap()).unwrap()
    }

    #[test]
    fn frozen_beta_is_rejected() {
        let p = ModelParams::frozen(2, 1.0, 0.0).unwrap();
        let x0 = Configuration::new(vec![-1.0, 1.0]);
        assert!(matches!(
            simulate_sde(&x0, &p, &SdeRunConfig::new(1.0, 1e-3, 1)),
            Err(Error::OutOfRegime(_))
        ));
    }

    #[test]
    fn charts_agree_on_drift() {
        // with dw = 0 and tiny dt both charts move the same way to first order
        let p = params(3, 0.7, 0.4, 50.0);
        let x = [-1.2, 0.1, 2.0];
        let dt = 1e-7;
        let zero = [0.0; 3];
        let xo = euler_step(&x, &p, Chart::Original, TimeScaling::Normalized, dt, &zero).unwrap();
        let xa = euler_step(&x, &p, Chart::Arsinh, TimeScaling::Normalized, dt, &zero).unwrap();
        for j in 0..3 {
            let vo = (xo[j] - x[j]) / dt;
            let va = (xa[j] - x[j]) / dt;
            // the arsinh drift carries the Itô correction, which maps back to -2x/β
            let want = vo - 2.0 * x[j] / 50.0;
            assert!((want - va).abs() < 1e-4 * (1.0 + vo.abs()), "{want} vs {va}");
        }
    }

    #[test]
    fn per_particle_scaling_is_one_nth() {
        let p = params(4, 1.0, 0.3, 4.0);
        let x = [-1.0, -0.2, 0.5, 1.5];
        let dw = [0.01, -0.02, 0.005, 0.0];
        let dt = 1e-3;
        for chart in [Chart::Original, Chart::Arsinh] {
            let full = euler_step(&x, &p, chart, TimeScaling::Normalized, dt, &dw).unwrap();
            let scaled_dw: Vec<f64> = dw.iter().map(|w| w * 2.0).collect();
            // drift/N over 4dt equals drift over dt; noise variance/N over 4dt
            // equals variance over dt, realised by doubling the increments
            let per = euler_step(&x, &p, chart, TimeScaling::PerParticle, 4.0 * dt, &scaled_dw).unwrap();
            for j in 0..4 {
                assert_relative_eq!(full[j], per[j], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn reproducible_and_order_preserving() {
        let p = params(5, 1.0, 0.5, 2.0);
        let x0 = Configuration::new(vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        let mut cfg = SdeRunConfig::new(1.0, 1e-3, 99);
        cfg.n_replicas = 4;
        cfg.integrator.record_every = 10;
        let a = simulate_sde(&x0, &p, &cfg).unwrap();
        let b = simulate_sde(&x0, &p, &cfg).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0].states.last(), a[1].states.last());
        for t in &a {
            t.validate().unwrap();
            assert_eq!(t.len(), 101);
        }
    }

    #[test]
    fn large_beta_tracks_frozen_path() {
        let beta = 1e6;
        let p = params(3, 1.0, 0.0, beta);
        let x0 = Configuration::new(vec![-1.0, 0.2, 1.5]);
        let cfg = SdeRunConfig::new(1.0, 1e-4, 5);
        let sde = simulate_sde(&x0, &p, &cfg).unwrap();
        let frozen = integrate_frozen(&x0, &ModelParams::frozen(3, 1.0, 0.0).unwrap(), &IntegratorConfig::until(1.0)).unwrap();
        let u = sde[0].last().unwrap().1.as_slice().to_vec();
        let v = frozen.last().unwrap().1.as_slice().to_vec();
        for j in 0..3 {
            assert!((u[j] - v[j]).abs() < 0.05);
        }
    }

    #[test]
    fn boundary_start() {
        let p = params(3, 1.0, 0.0, 2.0);
        let x0 = Configuration::new(vec![0.0, 0.0, 0.0]);
        for chart in [Chart::Original, Chart::Arsinh] {
            let mut cfg = SdeRunConfig::new(0.5, 1e-3, 3);
            cfg.chart = chart;
            let t = simulate_sde(&x0, &p, &cfg).unwrap();
            t[0].validate().unwrap();
            assert!(t[0].last().unwrap().1.as_slice().iter().all(|v| v.abs() < 10.0));
        }
    }
}
