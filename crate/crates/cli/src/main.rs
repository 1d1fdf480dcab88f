//! `hualab`: seeded, reproducible runs of the Hua-Pickrell numerical
//! laboratory. Every command writes CSV/JSON files and a `manifest.json`
//! into `--out`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};

mod clt;
mod evolve;
mod moments;
mod output;
mod verify;
mod zeros;

use output::OutDir;

#[derive(Debug, Parser)]
#[command(name = "hualab", version, about = "Hua-Pickrell particle systems: zeros, flows, CLT and moment checks")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "HUALAB_OUT", default_value = "hualab-out")]
    out: PathBuf,
    /// Write into a non-empty output directory.
    #[arg(long, global = true)]
    force: bool,
    /// Master seed for every random stream of the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Zeros of the pseudo-Jacobi polynomial P_n(·; a, b) with electrostatic residuals.
    Zeros(zeros::Args),
    /// Integrate the frozen flow or simulate the diffusion.
    Evolve(evolve::Args),
    /// Freezing-CLT covariances and the Metropolis comparison.
    Clt(clt::Args),
    /// Limiting moment flow.
    Moments(moments::Args),
    /// Residual and identity suites.
    Verify(verify::Args),
}

/// Outcome of a command: whether all its checks passed.
type Outcome = anyhow::Result<bool>;

fn run(cli: Cli) -> Outcome {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global()?;
    }
    // validate inputs before touching the output directory
    if let Command::Evolve(args) = &cli.command {
        if let Err(msg) = args.check_start() {
            let mut cmd = Cli::command();
            cmd.build();
            let sub = cmd.find_subcommand_mut("evolve").expect("evolve is a subcommand");
            sub.error(clap::error::ErrorKind::ValueValidation, msg).exit();
        }
    }
    let out = OutDir::prepare(&cli.out, cli.force)?;
    match cli.command {
        Command::Zeros(args) => zeros::run(args, out, cli.seed),
        Command::Evolve(args) => evolve::run(args, out, cli.seed),
        Command::Clt(args) => clt::run(args, out, cli.seed),
        Command::Moments(args) => moments::run(args, out, cli.seed),
        Command::Verify(args) => verify::run(args, out, cli.seed),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("hualab: one or more checks failed; see checks.csv");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("hualab: error: {e:#}");
            ExitCode::from(2)
        }
    }
}
