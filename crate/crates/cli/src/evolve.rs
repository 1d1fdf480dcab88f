use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use hualab_core::dynamics::{integrate_frozen, simulate_sde, Chart, IntegratorConfig, SdeRunConfig, TimeScaling};
use hualab_core::measures::EquilibriumMeasure;
use hualab_core::pseudojacobi::pseudo_jacobi_zeros;
use hualab_core::spectral_stats::MomentStart;
use hualab_core::{BetaParam, Configuration, ModelParams, Trajectory};
use serde::Serialize;

use crate::output::OutDir;

pub const PRESETS: [&str; 4] = ["equispaced", "quantile", "zeros", "symmetric-split"];

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Frozen,
    Sde,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartArg {
    Arsinh,
    Original,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingArg {
    Normalized,
    PerParticle,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    #[arg(long, value_enum, default_value = "frozen")]
    pub mode: Mode,
    /// Number of particles.
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub b: f64,
    /// Inverse temperature of the diffusion (ignored by the frozen flow).
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long)]
    pub t_end: f64,
    /// Preset (equispaced, quantile, zeros, symmetric-split) or a file of
    /// N ordered numbers separated by commas or whitespace.
    #[arg(long, default_value = "equispaced")]
    pub start: String,
    /// Initial step of the frozen integrator; fixed step of the diffusion.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Largest frozen step; bounds the spacing of recorded states.
    #[arg(long)]
    pub dt_max: Option<f64>,
    /// Local error tolerance of the frozen integrator.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Record every k-th accepted step (the final state is always kept).
    #[arg(long, default_value_t = 10)]
    pub record_every: usize,
    #[arg(long, default_value_t = 1)]
    pub replicas: usize,
    #[arg(long, value_enum, default_value = "arsinh")]
    pub chart: ChartArg,
    #[arg(long, value_enum, default_value = "normalized")]
    pub scaling: ScalingArg,
}

impl Args {
    pub fn check_start(&self) -> std::result::Result<(), String> {
        if PRESETS.contains(&self.start.as_str()) || Path::new(&self.start).is_file() {
            Ok(())
        } else {
            Err(format!(
                "start '{}' is neither a readable file nor one of the presets {}",
                self.start,
                PRESETS.join(", ")
            ))
        }
    }
}

fn equispaced(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|j| -1.0 + 2.0 * j as f64 / (n - 1) as f64).collect()
}

fn start_configuration(args: &Args) -> Result<Configuration> {
    let n = args.n;
    let x = match args.start.as_str() {
        "equispaced" => equispaced(n),
        "quantile" => {
            if args.a.is_nan() || args.a <= 0.0 {
                bail!("the quantile preset needs a > 0");
            }
            let m = EquilibriumMeasure::new(args.a / n as f64, args.b / n as f64)?;
            let s = m.sampler();
            (1..=n).map(|j| s.quantile((j as f64 - 0.5) / n as f64)).collect()
        }
        "zeros" => pseudo_jacobi_zeros(n, -(n as f64) - args.a, args.b)?.zeros,
        "symmetric-split" => MomentStart::Delta { spread: 1e-6 }.configuration(n).coords,
        path => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading start file {path}"))?;
            let x: Vec<f64> = text
                .lines()
                .filter(|l| !l.trim_start().starts_with('#'))
                .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().with_context(|| format!("bad number '{t}' in {path}")))
                .collect::<Result<_>>()?;
            if x.len() != n {
                bail!("start file {path} holds {} numbers, expected {n}", x.len());
            }
            x
        }
    };
    let c = Configuration::new(x);
    if !c.is_ordered(false) {
        bail!("start configuration is not ordered");
    }
    Ok(c)
}

fn trajectory_rows(t: &Trajectory) -> Vec<Vec<f64>> {
    t.times
        .iter()
        .zip(&t.states)
        .map(|(time, s)| std::iter::once(*time).chain(s.coords.iter().copied()).collect())
        .collect()
}

#[derive(Serialize)]
struct Summary {
    start: Vec<f64>,
    terminal_time: f64,
    terminal: Vec<Vec<f64>>,
    /// Sup-norm distance of each terminal state to the stationary zeros.
    distance_to_zeros: Option<Vec<f64>>,
}

pub fn run(args: Args, mut out: OutDir, seed: u64) -> Result<bool> {
    let x0 = start_configuration(&args)?;
    let n = args.n;
    let trajectories = match args.mode {
        Mode::Frozen => {
            let params = ModelParams::frozen(n, args.a, args.b)?;
            let cfg = IntegratorConfig {
                dt_init: args.dt,
                dt_max: args.dt_max.unwrap_or(f64::INFINITY),
                local_tol: args.tol,
                record_every: args.record_every,
                ..IntegratorConfig::until(args.t_end)
            };
            vec![integrate_frozen(&x0, &params, &cfg)?]
        }
        Mode::Sde => {
            let params = ModelParams::new(n, args.a, args.b, BetaParam::finite(args.beta)?)?;
            let mut cfg = SdeRunConfig::new(args.t_end, args.dt, seed);
            cfg.integrator.record_every = args.record_every;
            cfg.n_replicas = args.replicas;
            cfg.chart = match args.chart {
                ChartArg::Arsinh => Chart::Arsinh,
                ChartArg::Original => Chart::Original,
            };
            cfg.time_scaling = match args.scaling {
                ScalingArg::Normalized => TimeScaling::Normalized,
                ScalingArg::PerParticle => TimeScaling::PerParticle,
            };
            simulate_sde(&x0, &params, &cfg)?
        }
    };

    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|j| format!("x{j}")));
    let single = trajectories.len() == 1;
    for (r, t) in trajectories.iter().enumerate() {
        let name = if single { "trajectory.csv".to_string() } else { format!("trajectory_{r}.csv") };
        out.write_csv(&name, &header, &trajectory_rows(t))?;
    }

    let terminal: Vec<Vec<f64>> =
        trajectories.iter().map(|t| t.states.last().map(|s| s.coords.clone()).unwrap_or_default()).collect();
    let mut term_header = vec!["index".to_string()];
    term_header.extend((0..terminal.len()).map(|r| if single { "x".to_string() } else { format!("x_r{r}") }));
    let rows: Vec<Vec<f64>> =
        (0..n).map(|j| std::iter::once((j + 1) as f64).chain(terminal.iter().map(|x| x[j])).collect()).collect();
    out.write_csv("terminal.csv", &term_header, &rows)?;

    let distance_to_zeros = pseudo_jacobi_zeros(n, -(n as f64) - args.a, args.b).ok().map(|z| {
        terminal
            .iter()
            .map(|x| x.iter().zip(&z.zeros).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max))
            .collect()
    });
    let summary = Summary {
        start: x0.coords.clone(),
        terminal_time: trajectories[0].times.last().copied().unwrap_or(0.0),
        terminal,
        distance_to_zeros,
    };
    out.write_json("summary.json", &summary)?;
    out.finish("evolve", serde_json::to_value(&args)?, seed, Vec::new())
}
