use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hua_pickrell::{potential_v, HuaPickrellMeasure};
use crate::error::{Error, Result};
use crate::model::{is_ordered, Configuration};
use crate::pseudojacobi::pseudo_jacobi_zeros;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MhConfig {
    /// Standard deviation of the Gaussian proposal in the arsinh chart.
    pub step_scale: f64,
    /// Steps per chain, burn-in included.
    pub n_steps: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Independent chains, chain `k` using stream `k` of `seed`.
    pub n_chains: usize,
}

impl MhConfig {
    /// Proposal scale `0.5/√β · (1+N)^{-1/2}`.
    pub fn default_step_scale(n_particles: usize, beta: f64) -> f64 {
        0.5 / beta.sqrt() / (1.0 + n_particles as f64).sqrt()
    }

    pub fn for_target(target: &HuaPickrellMeasure, n_steps: usize, burn_in: usize, thin: usize, seed: u64) -> Self {
        Self {
            step_scale: Self::default_step_scale(target.params.n_particles, target.beta()),
            n_steps,
            burn_in,
            thin,
            seed,
            n_chains: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step_scale > 0.0) {
            return Err(Error::InvalidArgument("step_scale must be positive".into()));
        }
        if self.burn_in >= self.n_steps {
            return Err(Error::InvalidArgument("burn_in must be below n_steps".into()));
        }
        if self.thin == 0 || self.n_chains == 0 {
            return Err(Error::InvalidArgument("thin and n_chains must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MhResult {
    /// Retained states, chain by chain: chain `k` occupies
    /// `samples[k * per_chain .. (k + 1) * per_chain]`.
    pub samples: Vec<Configuration>,
    pub per_chain: usize,
    pub acceptance_rate: f64,
    /// Tuning warnings (acceptance below 1% or above 99%).
    pub warnings: Vec<String>,
}

/// Chamber point to start from: the frozen stationary configuration when it
/// exists, otherwise an equispaced configuration in the arsinh chart.
fn start_state(target: &HuaPickrellMeasure) -> Vec<f64> {
    let p = &target.params;
    let n = p.n_particles;
    if p.a > 0.0 {
        if let Ok(z) = pseudo_jacobi_zeros(n, p.stationary_pj_a(), p.b) {
            return z.zeros.iter().map(|x| x.asinh()).collect();
        }
    }
    (0..n).map(|j| if n == 1 { 0.0 } else { -1.0 + 2.0 * j as f64 / (n - 1) as f64 }).collect()
}

fn run_chain(target: &HuaPickrellMeasure, cfg: &MhConfig, chain: u64) -> Result<(Vec<Configuration>, usize)> {
    let mut rng = rng::stream(cfg.seed, chain);
    let mut y = start_state(target);
    let mut v = potential_v(&y, &target.params)?;
    let mut proposal = vec![0.0; y.len()];
    let mut accepted = 0usize;
    let mut out = Vec::with_capacity((cfg.n_steps - cfg.burn_in) / cfg.thin + 1);
    for step in 0..cfg.n_steps {
        for (p, yj) in proposal.iter_mut().zip(&y) {
            *p = yj + cfg.step_scale * rng.sample::<f64, _>(StandardNormal);
        }
        // always draw the uniform so the stream advances identically
        let u: f64 = rng.random();
        if is_ordered(&proposal, true) {
            let v_new = potential_v(&proposal, &target.params)?;
            if v_new.is_finite() && u.ln() < v - v_new {
                y.copy_from_slice(&proposal);
                v = v_new;
                accepted += 1;
            }
        }
        if step >= cfg.burn_in && (step - cfg.burn_in).is_multiple_of(cfg.thin) {
            let x: Vec<f64> = y.iter().map(|t| t.sinh()).collect();
            out.push(Configuration::new(x));
        }
    }
    Ok((out, accepted))
}

/// Random-walk Metropolis for the Hua-Pickrell law, run in the chart
/// `y = arsinh x` with target `exp(-V)`. Proposals leaving the chamber are
/// rejected. Deterministic given the seed.
pub fn mh_sample(target: &HuaPickrellMeasure, cfg: &MhConfig) -> Result<MhResult> {
    cfg.validate()?;
    let runs: Vec<(Vec<Configuration>, usize)> = (0..cfg.n_chains as u64)
        .into_par_iter()
        .map(|k| run_chain(target, cfg, k))
        .collect::<Result<_>>()?;
    let per_chain = runs[0].0.len();
    let accepted: usize = runs.iter().map(|r| r.1).sum();
    let acceptance_rate = accepted as f64 / (cfg.n_steps * cfg.n_chains) as f64;
    let mut warnings = Vec::new();
    if acceptance_rate < 0.01 {
        warnings.push(format!("acceptance rate {acceptance_rate:.4} below 1%; decrease step_scale"));
    } else if acceptance_rate > 0.99 {
        warnings.push(format!("acceptance rate {acceptance_rate:.4} above 99%; increase step_scale"));
    }
    let samples = runs.into_iter().flat_map(|r| r.0).collect();
    Ok(MhResult { samples, per_chain, acceptance_rate, warnings })
}
