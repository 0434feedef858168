//! Experiment configuration: one JSON document per run, with top-level
//! scalar overrides from the command line.

use std::path::{Path, PathBuf};

use phmc_core::gradients::ScoreKind;
use phmc_core::smc::ResamplingScheme;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelChoice {
    Poisson,
    Lgssm { d: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    Pmmh,
    Phmc,
    HmcReference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepSpec {
    /// PHMC acceptance against the particle count.
    Particles { particles: Vec<usize> },
    /// PHMC acceptance over a step-size by trajectory-length grid.
    #[serde(rename = "epsilon_L_grid")]
    EpsilonLGrid { step_sizes: Vec<f64>, leapfrog_steps: Vec<usize> },
    /// PHMC against PMMH on the linear-Gaussian model for growing `d`,
    /// with dimension-scaled step sizes. Data are simulated per `d`.
    Dimension {
        dims: Vec<usize>,
        #[serde(default = "defaults::kappa_mean")]
        kappa_mean: f64,
        #[serde(default = "defaults::sigma_y")]
        sigma_y: f64,
        #[serde(default = "defaults::sigma_h")]
        sigma_h: f64,
        #[serde(default = "defaults::rho")]
        rho: f64,
        /// Base step size before the `d_theta^(-1/4)` scaling.
        #[serde(default = "defaults::base_step")]
        base_step: f64,
        /// Base trajectory length before the `d_theta^(1/4)` scaling.
        #[serde(default = "defaults::base_steps")]
        base_leapfrog_steps: f64,
    },
}

mod defaults {
    pub fn kappa_mean() -> f64 {
        0.5
    }
    pub fn sigma_y() -> f64 {
        0.25
    }
    pub fn sigma_h() -> f64 {
        0.2
    }
    pub fn rho() -> f64 {
        0.8
    }
    pub fn base_step() -> f64 {
        0.025
    }
    pub fn base_steps() -> f64 {
        5.0
    }
    pub fn ess_threshold() -> f64 {
        0.5
    }
    pub fn score() -> phmc_core::gradients::ScoreKind {
        phmc_core::gradients::ScoreKind::Quadratic
    }
    pub fn one() -> usize {
        1
    }
    pub fn acf_lags() -> usize {
        20
    }
}

/// Settings for every command; each command checks the fields it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelChoice,
    #[serde(default)]
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// True parameters (simulate, dimension sweep) or the evaluation point
    /// (grad-variance), keyed by component name.
    pub theta: Option<Value>,
    /// Chain starting point; defaults to `theta`.
    pub init: Option<Value>,
    /// Series length for simulation.
    pub length: Option<usize>,
    /// Dataset CSV, resolved against the config file's directory.
    pub data: Option<PathBuf>,
    pub particles: Option<usize>,
    pub particles_grid: Option<Vec<usize>>,
    pub runs: Option<usize>,
    #[serde(default = "defaults::ess_threshold")]
    pub ess_threshold: f64,
    #[serde(default)]
    pub resampling: ResamplingScheme,
    pub sampler: Option<SamplerKind>,
    #[serde(default = "defaults::score")]
    pub score: ScoreKind,
    pub iterations: Option<usize>,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default = "defaults::one")]
    pub thin: usize,
    pub leapfrog_steps: Option<usize>,
    pub step_size: Option<f64>,
    pub rw_scale: Option<f64>,
    #[serde(default)]
    pub reuse_current_loglik: bool,
    #[serde(default = "defaults::one")]
    pub chains: usize,
    pub sweep: Option<SweepSpec>,
    #[serde(default = "defaults::acf_lags")]
    pub acf_lags: usize,
}

/// A config as loaded: the typed settings, the effective JSON document
/// they came from (overrides applied), and its directory.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub document: Value,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    /// Replaces the output directory, relative to the working directory.
    pub fn set_output(&mut self, dir: PathBuf) {
        let dir = std::path::absolute(&dir).unwrap_or(dir);
        self.document["output"] = Value::String(dir.display().to_string());
        self.config.output = Some(dir);
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

/// Reads `path` and applies `key=value` overrides to top-level fields.
///
/// Override values are parsed as JSON when possible and taken as strings
/// otherwise, so `--set seed=3` and `--set output=runs/a` both work.
pub fn load(path: &Path, overrides: &[String]) -> CliResult<LoadedConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    let document: Value =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("config is not valid JSON: {e}")))?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    from_document(document, overrides, base_dir)
}

pub fn from_document(mut document: Value, overrides: &[String], base_dir: PathBuf) -> CliResult<LoadedConfig> {
    let obj = document
        .as_object_mut()
        .ok_or_else(|| CliError::config("config must be a JSON object"))?;
    let mut problems = Vec::new();
    for o in overrides {
        match o.split_once('=') {
            Some((key, raw)) if !key.is_empty() => {
                if matches!(obj.get(key), Some(Value::Object(_) | Value::Array(_))) {
                    problems.push(format!("--set {key}: only scalar fields can be overridden"));
                    continue;
                }
                let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
                obj.insert(key.to_string(), value);
            }
            _ => problems.push(format!("--set expects key=value, got {o:?}")),
        }
    }
    if !problems.is_empty() {
        return Err(CliError::Config(problems));
    }
    let config: ExperimentConfig =
        serde_json::from_value(document.clone()).map_err(|e| CliError::config(e.to_string()))?;
    Ok(LoadedConfig { config, document, base_dir })
}

/// Collects missing-field and range problems for one command.
#[derive(Debug, Default)]
pub struct Problems(pub Vec<String>);

impl Problems {
    pub fn require<'a, T>(&mut self, field: &str, v: &'a Option<T>) -> Option<&'a T> {
        if v.is_none() {
            self.0.push(format!("missing required field `{field}`"));
        }
        v.as_ref()
    }

    pub fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }

    pub fn extend(&mut self, more: impl IntoIterator<Item = String>) {
        self.0.extend(more);
    }

    pub fn finish(self) -> CliResult<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(self.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn overrides_replace_scalars() {
        let doc = json!({"model": {"kind": "poisson"}, "seed": 1, "output": "a"});
        let c = from_document(doc, &["seed=7".into(), "output=runs/b".into()], PathBuf::new()).unwrap();
        assert_eq!(c.config.seed, 7);
        assert_eq!(c.config.output, Some(PathBuf::from("runs/b")));
        assert_eq!(c.document["seed"], json!(7));
    }

    #[test]
    fn structured_fields_cannot_be_overridden() {
        let doc = json!({"model": {"kind": "poisson"}});
        let err = from_document(doc, &["model=poisson".into(), "oops".into()], PathBuf::new()).unwrap_err();
        match err {
            CliError::Config(p) => assert_eq!(p.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let doc = json!({"model": {"kind": "poisson"}, "particls": 5});
        assert!(from_document(doc, &[], PathBuf::new()).is_err());
    }

    #[test]
    fn sweep_kinds_parse() {
        let doc = json!({"model": {"kind": "lgssm", "d": 5},
                         "sweep": {"kind": "epsilon_L_grid", "step_sizes": [0.1], "leapfrog_steps": [1, 5]}});
        let c = from_document(doc, &[], PathBuf::new()).unwrap();
        assert!(matches!(c.config.sweep, Some(SweepSpec::EpsilonLGrid { .. })));
        assert_eq!(c.config.model, ModelChoice::Lgssm { d: 5 });
        let doc = json!({"model": {"kind": "lgssm", "d": 5}, "sweep": {"kind": "dimension", "dims": [5]}});
        match from_document(doc, &[], PathBuf::new()).unwrap().config.sweep {
            Some(SweepSpec::Dimension { rho, base_step, .. }) => assert_eq!((rho, base_step), (0.8, 0.025)),
            other => panic!("{other:?}"),
        }
    }
}
