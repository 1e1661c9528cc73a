//! Experiment command-line front end.
//!
//! Thin argument-parsing shell over the library's experiment drivers; all
//! numerical work lives in the library.  Exit codes: 0 success, 2 for
//! configuration problems, 3 for numerical aborts.

use clap::{Args, Parser, Subcommand};
use kgs::config::{
    load_config, BilinearConfig, NormsConfig, SimulateConfig, SmoothingConfig, SplitConfig,
};
use kgs::experiment::{
    run_bilinear_probe, run_norms, run_simulate, run_smoothing_study, run_split,
};
use kgs::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "kgs",
    about = "Pseudospectral experiments for the coupled Schrodinger / Klein-Gordon system",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// JSON config file; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV/JSON artifacts and the run manifest.
    #[arg(long)]
    out: PathBuf,
    /// Override the config's seed (single-seed runs) or re-base its seed
    /// list to seed, seed+1, ... (sweep runs).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread budget; accepted for forward compatibility, the
    /// current implementation computes on one thread.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full nonlinear evolution with conserved-quantity tracking.
    Simulate(Common),
    /// Low/high frequency splitting norm-scaling sweep.
    Split(Common),
    /// Interval-iteration smoothing-exponent measurement.
    SmoothingStudy(Common),
    /// Dyadic bilinear product-norm probe.
    BilinearProbe(Common),
    /// Space-time norms of free evolutions.
    Norms(Common),
}

fn load<T: serde::de::DeserializeOwned + Default>(common: &Common) -> Result<T, Error> {
    match &common.config {
        Some(path) => load_config(path),
        None => Ok(T::default()),
    }
}

fn rebase(seeds: &mut Vec<u64>, base: u64) {
    *seeds = (0..seeds.len() as u64).map(|i| base + i).collect();
}

fn validate_threads(common: &Common) -> Result<(), Error> {
    if let Some(0) = common.threads {
        return Err(Error::Parameter("threads must be at least 1".into()));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match &cli.cmd {
        Cmd::Simulate(c) => {
            validate_threads(c)?;
            let mut cfg: SimulateConfig = load(c)?;
            if let Some(seed) = c.seed {
                cfg.seed = seed;
            }
            run_simulate(&cfg, &c.out)?;
        }
        Cmd::Split(c) => {
            validate_threads(c)?;
            let mut cfg: SplitConfig = load(c)?;
            if let Some(seed) = c.seed {
                rebase(&mut cfg.seeds, seed);
            }
            run_split(&cfg, &c.out)?;
        }
        Cmd::SmoothingStudy(c) => {
            validate_threads(c)?;
            let mut cfg: SmoothingConfig = load(c)?;
            if let Some(seed) = c.seed {
                rebase(&mut cfg.seeds, seed);
            }
            run_smoothing_study(&cfg, &c.out)?;
        }
        Cmd::BilinearProbe(c) => {
            validate_threads(c)?;
            let mut cfg: BilinearConfig = load(c)?;
            if let Some(seed) = c.seed {
                rebase(&mut cfg.seeds, seed);
            }
            run_bilinear_probe(&cfg, &c.out)?;
        }
        Cmd::Norms(c) => {
            validate_threads(c)?;
            let mut cfg: NormsConfig = load(c)?;
            if let Some(seed) = c.seed {
                cfg.seed = seed;
            }
            run_norms(&cfg, &c.out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = err.exit_code();
            let report = serde_json::json!({
                "error": err.to_string(),
                "exit_code": code,
            });
            eprintln!("{report}");
            ExitCode::from(code as u8)
        }
    }
}
