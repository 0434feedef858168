use std::time::Instant;

use phmc_core::gradients::{score_quadratic, ScoreKind};
use phmc_core::rng::RngSeed;
use phmc_core::smc::run_filter;
use rayon::prelude::*;

use super::{check_filter, filter_config, load_observations, output_dir, params};
use crate::config::{LoadedConfig, Problems};
use crate::error::CliResult;
use crate::models::{with_model, CliModel};
use crate::output::{csv_writer, prepare_dir, sample_variance, write_manifest};

pub const OUTPUT_FILE: &str = "grad_variance.csv";
pub const HEADER: [&str; 5] = ["estimator", "N", "component", "variance", "runs"];

/// Per-component variance of both score estimators over `runs` filter runs
/// at each particle count. Both estimates of a run share one particle
/// system.
pub fn grad_variance(loaded: &LoadedConfig) -> CliResult<()> {
    with_model!(loaded.config.model, m => run(&m, loaded))
}

fn run<M: CliModel>(m: &M, loaded: &LoadedConfig) -> CliResult<()> {
    let started = Instant::now();
    let cfg = &loaded.config;
    let mut problems = Problems::default();
    let theta = params(m, "theta", cfg.theta.as_ref(), &mut problems);
    let grid = problems.require("particles_grid", &cfg.particles_grid).cloned().unwrap_or_default();
    let runs = problems.require("runs", &cfg.runs).copied().unwrap_or(2);
    problems.check(runs >= 2, || format!("`runs` is {runs}; variances need at least 2 runs"));
    problems.check(cfg.particles_grid.is_none() || !grid.is_empty(), || "`particles_grid` is empty".into());
    for &n in &grid {
        check_filter(cfg, n, &mut problems);
    }
    let dir = output_dir(loaded, &mut problems);
    let y = load_observations::<M>(loaded, &mut problems)?;
    problems.finish()?;
    let (theta, y, dir) = (theta.unwrap(), y.unwrap(), prepare_dir(&dir.unwrap())?);

    let seed = RngSeed(cfg.seed);
    let tasks: Vec<(usize, usize)> = grid.iter().flat_map(|&n| (0..runs).map(move |r| (n, r))).collect();
    let estimates = tasks
        .par_iter()
        .map(|&(n, r)| {
            let mut rng = seed.stream(&[n as u64, r as u64]);
            let fit = run_filter(m, &theta, &y, &filter_config(cfg, n), &mut rng, Some(ScoreKind::Linear))?;
            let quad = score_quadratic(m, &theta, &fit.system, &y)?;
            Ok((fit.score.expect("score requested").score, quad.score))
        })
        .collect::<phmc_core::Result<Vec<_>>>()?;

    let mut w = csv_writer(&dir.join(OUTPUT_FILE))?;
    w.write_record(HEADER)?;
    for (gi, &n) in grid.iter().enumerate() {
        let block = &estimates[gi * runs..(gi + 1) * runs];
        for (label, pick) in [("linear", 0usize), ("quadratic", 1)] {
            for (k, name) in m.param_names().iter().enumerate() {
                let xs: Vec<f64> = block.iter().map(|(a, b)| if pick == 0 { a[k] } else { b[k] }).collect();
                let var = sample_variance(&xs);
                w.write_record([label, &n.to_string(), name, &var.to_string(), &runs.to_string()])?;
            }
        }
    }
    w.flush()?;
    write_manifest(&dir, "grad-variance", &loaded.document, cfg.seed, started.elapsed())
}
