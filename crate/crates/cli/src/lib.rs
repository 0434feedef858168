//! Experiment front end for the particle MCMC engine.
//!
//! Each command reads one JSON config, validates everything it needs
//! before computing, and writes CSV/JSON artifacts plus a `manifest.json`
//! into the configured output directory. Outputs depend only on the
//! config, the input files, and the seed.

pub mod commands;
pub mod config;
pub mod error;
pub mod models;
pub mod output;

pub use error::{CliError, CliResult};

use config::LoadedConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Simulate,
    GradVariance,
    Sample,
    Sweep,
}

pub fn run(command: Command, loaded: &LoadedConfig) -> CliResult<()> {
    match command {
        Command::Simulate => commands::simulate(loaded),
        Command::GradVariance => commands::grad_variance(loaded),
        Command::Sample => commands::sample(loaded),
        Command::Sweep => commands::sweep(loaded),
    }
}

/// Sizes the global worker pool from `PHMC_WORKERS` when set.
pub fn init_workers() -> CliResult<()> {
    let Ok(raw) = std::env::var("PHMC_WORKERS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::config(format!("PHMC_WORKERS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(format!("cannot size worker pool: {e}")))
}
