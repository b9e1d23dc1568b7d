//! `qwork`: work statistics experiments from JSON configs.

mod commands;
mod config;
mod output;
mod spin;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde_json::Value;

use config::{ExperimentConfig, Loaded};
use output::Writer;

#[derive(Parser)]
#[command(name = "qwork", version, about = "Quantum work statistics under projective and Gaussian energy measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Reserved; every pipeline is deterministic and ignores it.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Spin-quench curves, mean sweeps and imprecise-limit comparisons.
    SpinQuench { config: Option<PathBuf> },
    /// Work distribution of one scheme.
    WorkPdf { config: PathBuf },
    /// Mean work against the measurement width.
    AverageSweep { config: PathBuf },
    /// Fluctuation relations, oracle agreement and resolution margins.
    Verify {
        config: Option<PathBuf>,
        /// Scale the heaviest weight by `1 + DELTA` before checking.
        #[arg(long, value_name = "DELTA", allow_hyphen_values = true)]
        perturb_weight: Option<f64>,
    },
    /// Analytic pdf against the grid simulation of the pointer.
    OracleCompare {
        config: PathBuf,
        #[arg(long, default_value_t = 1 << 14)]
        points: usize,
    },
}

fn load(path: Option<&Path>, fallback: impl FnOnce() -> ExperimentConfig) -> Result<Loaded> {
    match path {
        Some(p) => config::load(p),
        None => {
            let config = fallback();
            Ok(Loaded {
                raw: serde_json::to_value(&config)?,
                config,
            })
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let mut out = Writer::new(&cli.out)?;
    let (name, path, loaded, pass, notes): (&str, Option<PathBuf>, Loaded, bool, Value) = match cli.command {
        Command::SpinQuench { config } => {
            let l = load(config.as_deref(), ExperimentConfig::default)?;
            let notes = spin::run(&l.config, &mut out)?;
            ("spin-quench", config, l, true, notes)
        }
        Command::WorkPdf { config } => {
            let l = config::load(&config)?;
            let notes = commands::work_pdf(&l.config, &mut out)?;
            ("work-pdf", Some(config), l, true, notes)
        }
        Command::AverageSweep { config } => {
            let l = config::load(&config)?;
            let notes = commands::average_sweep(&l.config, &mut out)?;
            ("average-sweep", Some(config), l, true, notes)
        }
        Command::Verify { config, perturb_weight } => {
            let l = load(config.as_deref(), || {
                let mut c = ExperimentConfig::default();
                c.system.canonical = Some(1.0);
                c
            })?;
            let (pass, notes) = commands::verify(&l.config, &mut out, perturb_weight)?;
            ("verify", config, l, pass, notes)
        }
        Command::OracleCompare { config, points } => {
            let l = config::load(&config)?;
            let (pass, notes) = commands::oracle_compare(&l.config, &mut out, points)?;
            ("oracle-compare", Some(config), l, pass, notes)
        }
    };
    out.finish(name, path.as_deref(), &loaded.raw, cli.seed, notes)?;
    Ok(pass)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
