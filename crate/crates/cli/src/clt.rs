use anyhow::Result;
use hualab_core::spectral_stats::{
    build_covariances, clt_eigenvalues, det_s_closed_form, eigenvector_structure_check, mc_freezing_test,
};
use serde::Serialize;

use crate::output::{checks_csv, fmt, Check, OutDir};

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    #[arg(long)]
    pub n: usize,
    /// Must be positive.
    #[arg(long)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub b: f64,
    /// Comma-separated inverse temperatures for the Monte Carlo comparison.
    #[arg(long, value_delimiter = ',', default_value = "100,10000")]
    pub betas: Vec<f64>,
    /// Metropolis samples per β; 0 skips the Monte Carlo part.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Bound on the relative covariance error at the largest β.
    #[arg(long, default_value_t = 0.05)]
    pub rel_tol: f64,
    /// Allowed mean defect in standard errors at the largest β.
    #[arg(long, default_value_t = 3.0)]
    pub mean_se: f64,
    /// Tolerance of the spectral, determinant and eigenvector checks.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Serialize)]
struct Summary {
    zeros: Vec<f64>,
    eigenvalues: Vec<f64>,
    det_s: f64,
    det_s_closed_form: f64,
    spectrum_defect: f64,
    eigenvector_defect: f64,
    rel_errors: Vec<f64>,
    acceptance_rates: Vec<f64>,
    warnings: Vec<String>,
}

pub fn run(args: Args, mut out: OutDir, seed: u64) -> Result<bool> {
    const SUITE: &str = "clt";
    let cs = build_covariances(args.n, args.a, args.b)?;
    let n = args.n;
    out.write_matrix("s.csv", n, n, |i, j| cs.s[(i, j)])?;
    out.write_matrix("s_tilde.csv", n, n, |i, j| cs.s_tilde[(i, j)])?;
    out.write_matrix("sigma.csv", n, n, |i, j| cs.sigma[(i, j)])?;
    let expected = clt_eigenvalues(n, args.a);
    let rows: Vec<Vec<f64>> =
        cs.eigenvalues.iter().zip(&expected).enumerate().map(|(k, (l, e))| vec![(k + 1) as f64, *l, *e]).collect();
    out.write_csv("eigenvalues.csv", &["k", "eigenvalue", "expected"], &rows)?;

    let det = cs.det_s();
    let det_cf = det_s_closed_form(n, args.a, args.b);
    out.write_table(
        "determinant.csv",
        &["quantity", "value"],
        &[
            vec!["det_s".into(), fmt(det)],
            vec!["det_s_closed_form".into(), fmt(det_cf)],
            vec!["det_s_direct".into(), fmt(cs.s.determinant())],
        ],
    )?;
    let ev_defect = eigenvector_structure_check(&cs)?;
    let mut checks = vec![
        Check::below(SUITE, "spectrum of S_tilde (relative)", cs.spectrum_defect, args.tol),
        Check::above(SUITE, "smallest eigenvalue", cs.eigenvalues[0], 0.0),
        Check::below(SUITE, "det S vs closed form (relative)", ((det - det_cf) / det_cf).abs(), args.tol),
        Check::below(SUITE, "eigenvector defect", ev_defect, args.tol),
    ];

    let mut summary = Summary {
        zeros: cs.zeros.zeros.clone(),
        eigenvalues: cs.eigenvalues.clone(),
        det_s: det,
        det_s_closed_form: det_cf,
        spectrum_defect: cs.spectrum_defect,
        eigenvector_defect: ev_defect,
        rel_errors: Vec::new(),
        acceptance_rates: Vec::new(),
        warnings: Vec::new(),
    };
    if args.samples > 0 && !args.betas.is_empty() {
        let r = mc_freezing_test(n, args.a, args.b, &args.betas, args.samples, seed)?;
        let rows: Vec<Vec<f64>> = (0..r.beta_grid.len())
            .map(|i| vec![r.beta_grid[i], r.rel_errors[i], r.rel_error_ses[i], r.mean_norms[i], r.mean_ses[i], r.acceptance_rates[i]])
            .collect();
        out.write_csv("rel_error.csv", &["beta", "rel_error", "rel_error_se", "mean_norm", "mean_se", "acceptance"], &rows)?;
        for (i, c) in r.empirical_cov.iter().enumerate() {
            out.write_matrix(&format!("cov_beta{i}.csv"), n, n, |j, k| c[(j, k)])?;
        }
        let last = r.beta_grid.len() - 1;
        checks.push(Check::below(SUITE, "rel_error at largest beta", r.rel_errors[last], args.rel_tol));
        checks.push(Check::below(
            SUITE,
            "mean defect / SE at largest beta",
            r.mean_norms[last] / r.mean_ses[last],
            args.mean_se,
        ));
        checks.push(Check::flag(SUITE, "rel_error non-increasing in beta", r.trend_ok()));
        summary.rel_errors = r.rel_errors.clone();
        summary.acceptance_rates = r.acceptance_rates.clone();
        summary.warnings = r.warnings.clone();
    }
    out.write_json("summary.json", &summary)?;
    checks_csv(&mut out, &checks)?;
    out.finish("clt", serde_json::to_value(&args)?, seed, checks)
}
