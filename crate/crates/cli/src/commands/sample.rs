use std::path::Path;
use std::time::Instant;

use phmc_core::diagnostics::{
    finite_difference_score, kalman_log_likelihood, summarize_chain, summarize_latents, DEFAULT_FD_STEP,
};
use phmc_core::model::{LinearGaussianModel, StateSpaceModel};
use phmc_core::rng::RngSeed;
use phmc_core::samplers::{hmc, phmc, pmmh, ChainOutput, SamplerConfig};
use serde_json::json;

use super::{check_filter, load_observations, output_dir, sampler_config, start_point};
use crate::config::{ExperimentConfig, LoadedConfig, ModelChoice, Problems, SamplerKind};
use crate::error::{CliError, CliResult};
use crate::models::{lgssm, with_model, CliModel};
use crate::output::{csv_writer, prepare_dir, write_json, write_manifest};

pub const CHAIN_FILE: &str = "chain.csv";
pub const TRAJECTORY_FILE: &str = "trajectories.csv";
pub const LATENT_FILE: &str = "latent_summary.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TRAJECTORY_HEADER: [&str; 3] = ["iter", "t", "h"];
pub const LATENT_HEADER: [&str; 4] = ["t", "mean", "lower", "upper"];

/// `iter,<parameter names>,log_z,accepted`.
pub fn chain_header(names: &[String]) -> Vec<String> {
    let mut h = vec!["iter".to_string()];
    h.extend(names.iter().cloned());
    h.push("log_z".into());
    h.push("accepted".into());
    h
}

/// Runs one chain and writes its draws, latent paths, and summaries.
pub fn sample(loaded: &LoadedConfig) -> CliResult<()> {
    match (loaded.config.sampler, loaded.config.model) {
        (Some(SamplerKind::HmcReference), ModelChoice::Lgssm { d }) => run_reference(&lgssm(d)?, loaded),
        (Some(SamplerKind::HmcReference), _) => {
            Err(CliError::config("`hmc-reference` needs the exact likelihood and supports only the lgssm model"))
        }
        _ => with_model!(loaded.config.model, m => run(&m, loaded)),
    }
}

fn common_checks(cfg: &ExperimentConfig, sc: &SamplerConfig, problems: &mut Problems) {
    problems.require("sampler", &cfg.sampler);
    problems.require("iterations", &cfg.iterations);
    if cfg.iterations.is_some() {
        problems.check(sc.iterations > sc.burn_in, || {
            format!("iterations ({}) must exceed burn_in ({})", sc.iterations, sc.burn_in)
        });
    }
    problems.check(sc.thin >= 1, || "`thin` must be at least 1".into());
}

fn hamiltonian_checks(cfg: &ExperimentConfig, problems: &mut Problems) {
    if let Some(l) = problems.require("leapfrog_steps", &cfg.leapfrog_steps) {
        problems.check(*l >= 1, || "`leapfrog_steps` must be at least 1".into());
    }
    if let Some(e) = problems.require("step_size", &cfg.step_size) {
        problems.check(*e > 0.0 && e.is_finite(), || format!("`step_size` must be positive, got {e}"));
    }
}

fn run<M: CliModel>(m: &M, loaded: &LoadedConfig) -> CliResult<()> {
    let started = Instant::now();
    let cfg = &loaded.config;
    let mut problems = Problems::default();
    let particles = problems.require("particles", &cfg.particles).copied().unwrap_or(1);
    check_filter(cfg, particles, &mut problems);
    let sc = sampler_config(cfg, particles, RngSeed(cfg.seed));
    common_checks(cfg, &sc, &mut problems);
    match cfg.sampler {
        Some(SamplerKind::Phmc) => hamiltonian_checks(cfg, &mut problems),
        Some(SamplerKind::Pmmh) => {
            if let Some(s) = problems.require("rw_scale", &cfg.rw_scale) {
                problems.check(*s >= 0.0 && s.is_finite(), || format!("`rw_scale` must be non-negative, got {s}"));
            }
        }
        _ => {}
    }
    let init = start_point(m, cfg, &mut problems);
    let dir = output_dir(loaded, &mut problems);
    let y = load_observations::<M>(loaded, &mut problems)?;
    problems.finish()?;
    let (init, y, dir) = (init.unwrap(), y.unwrap(), prepare_dir(&dir.unwrap())?);

    let out = match cfg.sampler {
        Some(SamplerKind::Phmc) => phmc(m, &y, &sc, &init, cfg.score)?,
        _ => pmmh(m, &y, &sc, &init)?,
    };
    write_chain(&dir, m.param_names(), &out)?;
    write_trajectories(&dir, &out)?;
    let latents = summarize_latents(&out)?;
    let mut w = csv_writer(&dir.join(LATENT_FILE))?;
    w.write_record(LATENT_HEADER)?;
    for t in 0..latents.mean.len() {
        w.write_record([
            (t + 1).to_string(),
            latents.mean[t].to_string(),
            latents.lower[t].to_string(),
            latents.upper[t].to_string(),
        ])?;
    }
    w.flush()?;
    write_summary(&dir, cfg, m.param_names(), &out)?;
    write_manifest(&dir, "sample", &loaded.document, cfg.seed, started.elapsed())
}

/// Reference HMC on the exact linear-Gaussian posterior. The gradient is
/// the central finite difference of the Kalman log-likelihood plus the
/// analytic prior gradient.
fn run_reference(m: &LinearGaussianModel, loaded: &LoadedConfig) -> CliResult<()> {
    let started = Instant::now();
    let cfg = &loaded.config;
    let mut problems = Problems::default();
    let sc = sampler_config(cfg, 1, RngSeed(cfg.seed));
    common_checks(cfg, &sc, &mut problems);
    hamiltonian_checks(cfg, &mut problems);
    let init = start_point(m, cfg, &mut problems);
    let dir = output_dir(loaded, &mut problems);
    let y = load_observations::<LinearGaussianModel>(loaded, &mut problems)?;
    problems.finish()?;
    let (init, y, dir) = (init.unwrap(), y.unwrap(), prepare_dir(&dir.unwrap())?);

    let loglik = |t: &[f64]| kalman_log_likelihood(m, t, &y).unwrap_or(f64::NAN);
    let log_post = |t: &[f64]| {
        if !m.in_support(t) {
            return f64::NEG_INFINITY;
        }
        loglik(t) + m.log_prior(t)
    };
    let grad = |t: &[f64]| {
        let mut g = finite_difference_score(loglik, t, DEFAULT_FD_STEP);
        m.add_grad_log_prior(t, &mut g);
        g
    };
    let mut out = hmc(log_post, grad, &sc, &init)?;
    for d in &mut out.draws {
        d.log_z = loglik(&d.theta);
    }
    write_chain(&dir, m.param_names(), &out)?;
    write_summary(&dir, cfg, m.param_names(), &out)?;
    write_manifest(&dir, "sample", &loaded.document, cfg.seed, started.elapsed())
}

fn write_chain<S>(dir: &Path, names: &[String], out: &ChainOutput<S>) -> CliResult<()> {
    let mut w = csv_writer(&dir.join(CHAIN_FILE))?;
    w.write_record(chain_header(names))?;
    for d in &out.draws {
        let mut row = vec![d.iter.to_string()];
        row.extend(d.theta.iter().map(f64::to_string));
        row.push(d.log_z.to_string());
        row.push(u8::from(out.accepted[d.iter - 1]).to_string());
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_trajectories(dir: &Path, out: &ChainOutput<f64>) -> CliResult<()> {
    let mut w = csv_writer(&dir.join(TRAJECTORY_FILE))?;
    w.write_record(TRAJECTORY_HEADER)?;
    for d in &out.draws {
        let iter = d.iter.to_string();
        for (t, h) in d.trajectory.iter().enumerate() {
            w.write_record([iter.as_str(), &(t + 1).to_string(), &h.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_summary<S>(dir: &Path, cfg: &ExperimentConfig, names: &[String], out: &ChainOutput<S>) -> CliResult<()> {
    let lags = cfg.acf_lags.min(out.draws.len().saturating_sub(1));
    let summary = summarize_chain(out, names, lags)?;
    let score = match cfg.sampler {
        Some(SamplerKind::Phmc) => Some(cfg.score),
        _ => None,
    };
    write_json(
        &dir.join(SUMMARY_FILE),
        &json!({
            "sampler": cfg.sampler,
            "score": score,
            "seed": cfg.seed,
            "iterations": out.accepted.len(),
            "acceptance_rate": summary.acceptance_rate,
            "kept_draws": summary.kept_draws,
            "params": summary.params,
        }),
    )
}
