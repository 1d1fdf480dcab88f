use anyhow::Result;
use hualab_core::pseudojacobi::{electrostatic_residuals, pseudo_jacobi_zeros};
use serde::Serialize;

use crate::output::{checks_csv, Check, OutDir};

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Degree (number of zeros).
    #[arg(long)]
    pub n: usize,
    /// Pseudo-Jacobi parameter a; requires n < -a.
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub b: f64,
    /// Tolerance on each electrostatic residual.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

pub fn run(args: Args, mut out: OutDir, seed: u64) -> Result<bool> {
    let z = pseudo_jacobi_zeros(args.n, args.a, args.b)?;
    let res = electrostatic_residuals(&z.zeros, args.a, args.b)?;
    let rows: Vec<Vec<f64>> =
        z.zeros.iter().zip(&res).enumerate().map(|(j, (x, r))| vec![(j + 1) as f64, *x, *r]).collect();
    out.write_csv("zeros.csv", &["index", "zero", "residual"], &rows)?;
    let worst = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let checks = vec![
        Check::below("zeros", "max electrostatic residual", worst, args.tol),
        Check::below("zeros", "newton correction", z.residual, args.tol),
    ];
    checks_csv(&mut out, &checks)?;
    out.finish("zeros", serde_json::to_value(&args)?, seed, checks)
}
