use anyhow::Result;
use clap::ValueEnum;
use hualab_core::measures::EquilibriumMeasure;
use hualab_core::spectral_stats::{
    carleman_bound, cauchy_pde_residual, default_probes, integrate_moments_path, MomentSequence,
};
use serde::Serialize;

use crate::output::{checks_csv, Check, OutDir};

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Start {
    /// All mass at the origin.
    Delta,
    /// Uniform law on [-1, 1].
    Uniform,
    /// The equilibrium measure itself.
    Stationary,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    #[arg(long)]
    pub a_hat: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub b_hat: f64,
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    #[arg(long)]
    pub t_end: f64,
    #[arg(long, value_enum, default_value = "delta")]
    pub start: Start,
    /// Record every k-th RK4 step of size 1e-3.
    #[arg(long, default_value_t = 100)]
    pub record_every: usize,
}

#[derive(Serialize)]
struct Summary {
    final_moments: Vec<f64>,
    equilibrium_moments: Option<Vec<f64>>,
    max_gap_to_equilibrium: Option<f64>,
    pde_residual: Option<f64>,
    pde_note: Option<String>,
}

pub fn run(args: Args, mut out: OutDir, seed: u64) -> Result<bool> {
    const SUITE: &str = "moments";
    let equilibrium = if args.a_hat > 0.0 { Some(EquilibriumMeasure::new(args.a_hat, args.b_hat)?) } else { None };
    let (m0, gamma) = match args.start {
        Start::Delta => (MomentSequence::delta(args.n_max), 0.0),
        Start::Uniform => (MomentSequence::uniform(args.n_max), 1.0),
        Start::Stationary => {
            let Some(e) = &equilibrium else {
                anyhow::bail!("the stationary preset needs a_hat > 0");
            };
            let values = (0..=args.n_max as u32).map(|n| e.moment(n)).collect();
            (MomentSequence::new(values, 0.0)?, e.x_minus.abs().max(e.x_plus.abs()))
        }
    };
    let path = integrate_moments_path(&m0, args.a_hat, args.b_hat, args.t_end, args.record_every)?;

    let mut header = vec!["t".to_string()];
    header.extend((0..=args.n_max).map(|n| format!("m{n}")));
    let rows: Vec<Vec<f64>> =
        path.iter().map(|m| std::iter::once(m.t).chain(m.values.iter().copied()).collect()).collect();
    out.write_csv("moments.csv", &header, &rows)?;

    let last = path.last().expect("path holds the start");
    let mut checks = vec![Check::flag(
        SUITE,
        "Carleman bound along the path",
        path.iter().all(|m| m.satisfies_carleman(args.a_hat, args.b_hat, gamma)),
    )];
    let worst_ratio = path
        .iter()
        .flat_map(|m| {
            (1..=m.n_max).map(move |n| m.values[n].abs() / carleman_bound(n, args.a_hat, args.b_hat, gamma, m.t))
        })
        .fold(0.0, f64::max);
    checks.push(Check::below(SUITE, "max |m_n| / Carleman bound", worst_ratio, 1.0 + 1e-12));

    let eq_moments: Option<Vec<f64>> =
        equilibrium.as_ref().map(|e| (0..=args.n_max as u32).map(|n| e.moment(n)).collect());
    let gap = eq_moments
        .as_ref()
        .map(|e| e.iter().zip(&last.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    let (pde_residual, pde_note) = match cauchy_pde_residual(&path, args.a_hat, args.b_hat, &default_probes(), args.n_max) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let summary = Summary {
        final_moments: last.values.clone(),
        equilibrium_moments: eq_moments,
        max_gap_to_equilibrium: gap,
        pde_residual,
        pde_note,
    };
    out.write_json("summary.json", &summary)?;
    checks_csv(&mut out, &checks)?;
    out.finish("moments", serde_json::to_value(&args)?, seed, checks)
}
