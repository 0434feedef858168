//! The four experiment commands.

pub mod grad_variance;
pub mod sample;
pub mod simulate;
pub mod sweep;

pub use grad_variance::grad_variance;
pub use sample::sample;
pub use simulate::simulate;
pub use sweep::sweep;

use std::path::PathBuf;

use phmc_core::io::read_dataset;
use phmc_core::model::ParamVector;
use phmc_core::rng::RngSeed;
use phmc_core::samplers::SamplerConfig;
use phmc_core::smc::FilterConfig;
use serde_json::Value;

use crate::config::{ExperimentConfig, LoadedConfig, Problems};
use crate::error::{CliError, CliResult};
use crate::models::CliModel;

/// Parses a JSON parameter object against the model's component names,
/// recording problems instead of failing.
fn params<M: CliModel>(m: &M, field: &str, v: Option<&Value>, problems: &mut Problems) -> Option<Vec<f64>> {
    let v = match v {
        Some(v) => v,
        None => {
            problems.0.push(format!("missing required field `{field}`"));
            return None;
        }
    };
    match ParamVector::from_json(m.param_names(), v) {
        Ok(p) if m.in_support(p.values()) => Some(p.into_values()),
        Ok(p) => {
            problems.0.push(format!("`{field}` lies outside the prior support: {:?}", p.values()));
            None
        }
        Err(e) => {
            problems.0.push(format!("`{field}`: {e}"));
            None
        }
    }
}

/// The chain starting point: `init`, falling back to `theta`.
fn start_point<M: CliModel>(m: &M, cfg: &ExperimentConfig, problems: &mut Problems) -> Option<Vec<f64>> {
    match &cfg.init {
        Some(v) => params(m, "init", Some(v), problems),
        None => params(m, "init` or `theta", cfg.theta.as_ref(), problems),
    }
}

fn output_dir(loaded: &LoadedConfig, problems: &mut Problems) -> Option<PathBuf> {
    problems.require("output", &loaded.config.output).map(|p| loaded.resolve(p))
}

fn filter_config(cfg: &ExperimentConfig, particles: usize) -> FilterConfig {
    FilterConfig::new(particles).with_threshold(cfg.ess_threshold).with_scheme(cfg.resampling)
}

fn check_filter(cfg: &ExperimentConfig, particles: usize, problems: &mut Problems) {
    if let Err(e) = filter_config(cfg, particles).validate() {
        problems.0.push(e.to_string());
    }
}

/// Sampler settings from the config. Fields a sampler does not use keep
/// the library defaults; callers check the ones they need.
fn sampler_config(cfg: &ExperimentConfig, particles: usize, seed: RngSeed) -> SamplerConfig {
    let base = SamplerConfig::new(cfg.iterations.unwrap_or(0), particles, seed);
    SamplerConfig {
        burn_in: cfg.burn_in,
        thin: cfg.thin,
        leapfrog_steps: cfg.leapfrog_steps.unwrap_or(base.leapfrog_steps),
        step_size: cfg.step_size.unwrap_or(base.step_size),
        rw_scale: cfg.rw_scale.unwrap_or(base.rw_scale),
        filter: filter_config(cfg, particles),
        reuse_current_loglik: cfg.reuse_current_loglik,
        ..base
    }
}

fn load_observations<M: CliModel>(loaded: &LoadedConfig, problems: &mut Problems) -> CliResult<Option<Vec<M::Obs>>> {
    let Some(path) = problems.require("data", &loaded.config.data) else {
        return Ok(None);
    };
    let path = loaded.resolve(path);
    let ds = read_dataset(&path, M::KIND).map_err(|e| match e {
        phmc_core::Error::Io(io) => CliError::Runtime(phmc_core::Error::Data(format!("{}: {io}", path.display()))),
        other => CliError::Runtime(other),
    })?;
    Ok(Some(M::observations(&ds.y)?.to_vec()))
}
