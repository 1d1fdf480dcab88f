use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::covariance::{build_covariances, CovarianceSet};
use super::moments::{integrate_moments, MomentSequence};
use crate::dynamics::{integrate_frozen, simulate_sde, IntegratorConfig, SdeRunConfig, TimeScaling};
use crate::error::{Error, Result};
use crate::measures::{empirical_moments, mh_sample, EmpiricalMeasure, HuaPickrellMeasure, MhConfig};
use crate::model::{BetaParam, Configuration, ModelParams, Trajectory};

/// Chains per β in [`mc_freezing_test`].
pub const MC_CHAINS: usize = 8;
/// Metropolis steps between retained samples.
pub const MC_THIN: usize = 10;
pub const MC_BURN_IN: usize = 2_000;
/// Contiguous batches per chain for the batch-means standard error.
const BATCHES_PER_CHAIN: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltReport {
    pub beta_grid: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub target: CovarianceSet,
    /// Unbiased covariance of `√β (X − z)` per β.
    pub empirical_cov: Vec<DMatrix<f64>>,
    /// `‖C_emp − Σ‖_F / ‖Σ‖_F` per β.
    pub rel_errors: Vec<f64>,
    /// Batch-means standard error of `C_emp`, in the same relative units.
    pub rel_error_ses: Vec<f64>,
    /// `‖mean √β (X − z)‖` per β.
    pub mean_norms: Vec<f64>,
    /// Batch-means standard error of that mean (Euclidean norm over coordinates).
    pub mean_ses: Vec<f64>,
    pub acceptance_rates: Vec<f64>,
    pub warnings: Vec<String>,
}

impl CltReport {

    pub fn mean_within(&self, k_se: f64) -> Vec<bool> {
        self.mean_norms.iter().zip(&self.mean_ses).map(|(m, se)| *m < k_se * se).collect()
    }

    /// Whether the relative error never grows between consecutive β by
    /// more than three combined standard errors.
    pub fn trend_ok(&self) -> bool {
        (1..self.rel_errors.len()).all(|i| {
            let slack = 3.0 * self.rel_error_ses[i - 1].hypot(self.rel_error_ses[i]);
            self.rel_errors[i] <= self.rel_errors[i - 1] + slack
        })
    }
}

fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Samples the Hua-Pickrell law for each β by Metropolis and compares the
/// covariance of `√β (X − z)` with the limit `Σ`. Chains of one β run in
/// parallel; β values run in order.
pub fn mc_freezing_test(n: usize, a: f64, b: f64, beta_grid: &[f64], n_samples: usize, seed: u64) -> Result<CltReport> {
    if beta_grid.iter().any(|&beta| !(beta >= 1.0) || !beta.is_finite()) {
        return Err(Error::InvalidArgument("beta values must be finite and at least 1".into()));
    }
    if n_samples < 2 * MC_CHAINS * BATCHES_PER_CHAIN {
        return Err(Error::InvalidArgument(format!(
            "n_samples must be at least {}",
            2 * MC_CHAINS * BATCHES_PER_CHAIN
        )));
    }
    let target = build_covariances(n, a, b)?;
    let z = DVector::from_column_slice(&target.zeros.zeros);
    let per_chain = n_samples.div_ceil(MC_CHAINS);
    let mut report = CltReport {
        beta_grid: beta_grid.to_vec(),
        n_samples,
        seed,
        target,
        empirical_cov: Vec::new(),
        rel_errors: Vec::new(),
        rel_error_ses: Vec::new(),
        mean_norms: Vec::new(),
        mean_ses: Vec::new(),
        acceptance_rates: Vec::new(),
        warnings: Vec::new(),
    };

    for (i, &beta) in beta_grid.iter().enumerate() {
        let params = ModelParams::new(n, a, b, BetaParam::finite(beta)?)?;
        let hp = HuaPickrellMeasure::new(params)?;
        let mut cfg = MhConfig::for_target(&hp, MC_BURN_IN + MC_THIN * per_chain, MC_BURN_IN, MC_THIN, seed);
        cfg.seed = seed.wrapping_add(i as u64);
        cfg.n_chains = MC_CHAINS;
        let run = mh_sample(&hp, &cfg)?;
        report.warnings.extend(run.warnings.iter().map(|w| format!("beta = {beta}: {w}")));
        report.acceptance_rates.push(run.acceptance_rate);

        let scale = beta.sqrt();
        let w: Vec<DVector<f64>> = run
            .samples
            .iter()
            .map(|c| (DVector::from_column_slice(c.as_slice()) - &z) * scale)
            .collect();
        let count = w.len() as f64;
        let mean = w.iter().fold(DVector::zeros(n), |acc, v| acc + v) / count;
        let mut cov = DMatrix::zeros(n, n);
        for v in &w {
            let d = v - &mean;
            cov += &d * d.transpose();
        }
        cov /= count - 1.0;

        // batch means within each chain
        let size = run.per_chain / BATCHES_PER_CHAIN;
        let batches: Vec<DVector<f64>> = (0..MC_CHAINS)
            .flat_map(|c| (0..BATCHES_PER_CHAIN).map(move |k| c * run.per_chain + k * size))
            .map(|start| w[start..start + size].iter().fold(DVector::zeros(n), |acc, v| acc + v) / size as f64)
            .collect();
        let nb = batches.len() as f64;
        let mut cov_spread = 0.0;
        for start in (0..MC_CHAINS).flat_map(|c| (0..BATCHES_PER_CHAIN).map(move |k| c * run.per_chain + k * size)) {
            let mut cb = DMatrix::zeros(n, n);
            for v in &w[start..start + size] {
                let d = v - &mean;
                cb += &d * d.transpose();
            }
            cb /= size as f64;
            cov_spread += frobenius(&(cb - &cov)).powi(2);
        }
        let cov_se = (cov_spread / (nb * (nb - 1.0))).sqrt();
        let bmean = batches.iter().fold(DVector::zeros(n), |acc, v| acc + v) / nb;
        let var = batches.iter().fold(DVector::zeros(n), |acc, v| acc + (v - &bmean).map(|d| d * d)) / (nb - 1.0);
        let se = (var / nb).map(f64::sqrt);

        let sigma_norm = frobenius(&report.target.sigma);
        report.rel_errors.push(frobenius(&(&cov - &report.target.sigma)) / sigma_norm);
        report.rel_error_ses.push(cov_se / sigma_norm);
        report.mean_norms.push(mean.norm());
        report.mean_ses.push(se.norm());
        report.empirical_cov.push(cov);
    }
    Ok(report)
}

/// Initial law of [`finite_n_moment_flow_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MomentStart {
    /// Particles at `spread · (j − (N+1)/2) / N`, approximating `δ_0`.
    Delta { spread: f64 },
    /// Midpoint quantiles `−1 + (2j − 1)/N` of the uniform law on `[−1, 1]`.
    Uniform,
}

impl MomentStart {
    pub fn configuration(&self, n: usize) -> Configuration {
        let nf = n as f64;
        Configuration::new(
            (1..=n)
                .map(|j| match *self {
                    MomentStart::Delta { spread } => spread * (j as f64 - (nf + 1.0) / 2.0) / nf,
                    MomentStart::Uniform => -1.0 + (2.0 * j as f64 - 1.0) / nf,
                })
                .collect(),
        )
    }

    pub fn moments(&self, n_max: usize) -> MomentSequence {
        match self {
            MomentStart::Delta { .. } => MomentSequence::delta(n_max),
            MomentStart::Uniform => MomentSequence::uniform(n_max),
        }
    }
}

/// Settings of [`finite_n_moment_flow_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteNConfig {
    pub a_hat: f64,
    pub b_hat: f64,
    pub beta: BetaParam,
    pub n_grid: Vec<usize>,
    pub t: f64,
    pub start: MomentStart,
    /// Highest moment compared.
    pub n_moments: usize,
    /// Euler step for finite β.
    pub sde_dt: f64,
    pub seed: u64,
}

impl FiniteNConfig {
    pub fn new(a_hat: f64, b_hat: f64, beta: BetaParam, n_grid: Vec<usize>, t: f64, start: MomentStart) -> Self {
        Self { a_hat, b_hat, beta, n_grid, t, start, n_moments: 6, sde_dt: 1e-4, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteNReport {
    pub config: FiniteNConfig,
    pub limit: MomentSequence,
    /// `S_{N,n,t}` for `n = 0..=n_moments`, one row per grid entry.
    pub empirical: Vec<Vec<f64>>,
    /// `|S_{N,n,t} − m_n(t)|`, aligned with `empirical`.
    pub gaps: Vec<Vec<f64>>,
}

fn last_state(t: &Trajectory) -> Result<Configuration> {
    t.last().map(|(_, c)| c.clone()).ok_or_else(|| Error::Numerical("empty trajectory".into()))
}

/// Runs the N-rescaled system with `a_N = â N`, `b_N = b̂ N` to time `t` for
/// each `N` of the grid and compares its empirical moments with the
/// limiting moment ODE. At β = ∞ the rescaled flow is the frozen flow at
/// time `t/N`; finite β uses one Euler-Maruyama replica.
pub fn finite_n_moment_flow_check(cfg: &FiniteNConfig) -> Result<FiniteNReport> {
    let limit = integrate_moments(&cfg.start.moments(cfg.n_moments), cfg.a_hat, cfg.b_hat, cfg.t)?;
    let mut empirical = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let nf = n as f64;
        let params = ModelParams::new(n, cfg.a_hat * nf, cfg.b_hat * nf, cfg.beta)?;
        let x0 = cfg.start.configuration(n);
        let end = if cfg.t == 0.0 {
            x0
        } else if cfg.beta.is_frozen() {
            let icfg = IntegratorConfig { record_every: usize::MAX, ..IntegratorConfig::until(cfg.t / nf) };
            last_state(&integrate_frozen(&x0, &params, &icfg)?)?
        } else {
            let mut scfg = SdeRunConfig::new(cfg.t, cfg.sde_dt, cfg.seed);
            scfg.time_scaling = TimeScaling::PerParticle;
            scfg.integrator.record_every = usize::MAX;
            let mut runs = simulate_sde(&x0, &params, &scfg)?;
            last_state(&runs.remove(0))?
        };
        empirical.push(empirical_moments(&EmpiricalMeasure::new(end.coords)?, cfg.n_moments as u32));
    }
    let gaps = empirical
        .iter()
        .map(|s| s.iter().zip(&limit.values).map(|(a, b)| (a - b).abs()).collect())
        .collect();
    Ok(FiniteNReport { config: cfg.clone(), limit, empirical, gaps })
}
