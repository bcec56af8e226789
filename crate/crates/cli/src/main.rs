//! `painleve-spectra`: command-line front end for painleve-core.
//!
//! Exit codes: 0 on success, 1 when a computation or a verification check
//! fails, 2 on invalid flags.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use crate::config::{Cli, Command, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] painleve_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

const THREADS_VAR: &str = "PAINLEVE_SPECTRA_THREADS";

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

/// Returns whether the run succeeded (verification may fail without an error).
fn run(cli: Cli) -> Result<bool, CliError> {
    let needs_params = !matches!(cli.command, Command::Verify { .. });
    let cfg = RunConfig::from_opts(&cli.opts, needs_params)?;
    init_threads()?;
    let (report, ok) = match cli.command {
        Command::Spectrum => (commands::spectrum(&cfg)?, true),
        Command::Eigensolve { with_y } => (commands::eigensolve(&cfg, with_y)?, true),
        Command::ZeroModes { samples } => (commands::zero_modes(&cfg, samples)?, true),
        Command::Potential => (commands::potential(&cfg)?, true),
        Command::Verify { suite } => {
            let (mut r, ok) = commands::verify_suites(suite);
            let name = suite.to_possible_value().map_or_else(String::new, |v| v.get_name().to_owned());
            r.metadata.push(("suite", name));
            (r, ok)
        }
    };
    let bytes = report.render(cfg.format)?;
    match &cli.opts.output {
        Some(path) => std::fs::write(path, &bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("painleve-spectra: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
