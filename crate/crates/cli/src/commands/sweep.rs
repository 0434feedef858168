use std::time::Instant;

use phmc_core::model::{simulate_dataset, LinearGaussianModel};
use phmc_core::rng::RngSeed;
use phmc_core::samplers::{phmc, pmmh, SamplerConfig};
use rayon::prelude::*;

use super::{check_filter, load_observations, output_dir, sampler_config, start_point};
use crate::config::{ExperimentConfig, LoadedConfig, Problems, SweepSpec};
use crate::error::{CliError, CliResult};
use crate::models::{lgssm, with_model, CliModel};
use crate::output::{csv_writer, median, prepare_dir, sample_sd, write_manifest};

pub const OUTPUT_FILE: &str = "sweep.csv";
pub const PARTICLES_HEADER: [&str; 4] = ["N", "median_acceptance", "sd_acceptance", "chains"];
pub const GRID_HEADER: [&str; 5] = ["step_size", "leapfrog_steps", "median_acceptance", "sd_acceptance", "chains"];
pub const DIMENSION_HEADER: [&str; 9] = [
    "sampler",
    "d",
    "d_theta",
    "step_size",
    "leapfrog_steps",
    "rw_scale",
    "median_acceptance",
    "sd_acceptance",
    "chains",
];

/// Seed of chain `c`. It does not depend on the grid point, so every
/// point sees the same random streams.
fn chain_seed(cfg: &ExperimentConfig, c: usize) -> RngSeed {
    RngSeed(cfg.seed).derive(&[c as u64])
}

/// Runs every (grid point, chain) pair and returns the acceptance rates
/// grouped by point, in grid order.
fn rates_by_point<P, F>(points: &[P], chains: usize, run: F) -> CliResult<Vec<Vec<f64>>>
where
    P: Sync,
    F: Fn(&P, usize) -> phmc_core::Result<f64> + Sync,
{
    let tasks: Vec<(usize, usize)> = (0..points.len()).flat_map(|p| (0..chains).map(move |c| (p, c))).collect();
    let rates = tasks
        .par_iter()
        .map(|&(p, c)| run(&points[p], c))
        .collect::<phmc_core::Result<Vec<f64>>>()?;
    Ok(rates.chunks(chains).map(<[f64]>::to_vec).collect())
}

pub fn sweep(loaded: &LoadedConfig) -> CliResult<()> {
    match &loaded.config.sweep {
        None => Err(CliError::config("missing required field `sweep`")),
        Some(SweepSpec::Dimension { .. }) => run_dimension(loaded),
        Some(_) => with_model!(loaded.config.model, m => run_phmc_grid(&m, loaded)),
    }
}

fn hamiltonian_checks(cfg: &ExperimentConfig, problems: &mut Problems) {
    problems.require("iterations", &cfg.iterations);
    let sc = sampler_config(cfg, 1, RngSeed(0));
    if cfg.iterations.is_some() {
        problems.check(sc.iterations > sc.burn_in, || {
            format!("iterations ({}) must exceed burn_in ({})", sc.iterations, sc.burn_in)
        });
    }
    problems.check(cfg.thin >= 1, || "`thin` must be at least 1".into());
    problems.check(cfg.chains >= 1, || "`chains` must be at least 1".into());
}

fn run_phmc_grid<M: CliModel>(m: &M, loaded: &LoadedConfig) -> CliResult<()> {
    let started = Instant::now();
    let cfg = &loaded.config;
    let mut problems = Problems::default();
    hamiltonian_checks(cfg, &mut problems);
    // (particles, step size, leapfrog steps) per grid point.
    let points: Vec<(usize, f64, usize)> = match cfg.sweep.as_ref().expect("checked by caller") {
        SweepSpec::Particles { particles } => {
            let l = problems.require("leapfrog_steps", &cfg.leapfrog_steps).copied().unwrap_or(1);
            let e = problems.require("step_size", &cfg.step_size).copied().unwrap_or(1.0);
            particles.iter().map(|&n| (n, e, l)).collect()
        }
        SweepSpec::EpsilonLGrid { step_sizes, leapfrog_steps } => {
            let n = problems.require("particles", &cfg.particles).copied().unwrap_or(1);
            step_sizes.iter().flat_map(|&e| leapfrog_steps.iter().map(move |&l| (n, e, l))).collect()
        }
        SweepSpec::Dimension { .. } => unreachable!("dimension sweeps are handled separately"),
    };
    problems.check(!points.is_empty(), || "sweep grid is empty".into());
    for &(n, e, l) in &points {
        check_filter(cfg, n, &mut problems);
        problems.check(e > 0.0 && e.is_finite(), || format!("step size {e} must be positive"));
        problems.check(l >= 1, || "leapfrog steps must be at least 1".into());
    }
    let init = start_point(m, cfg, &mut problems);
    let dir = output_dir(loaded, &mut problems);
    let y = load_observations::<M>(loaded, &mut problems)?;
    problems.finish()?;
    let (init, y, dir) = (init.unwrap(), y.unwrap(), prepare_dir(&dir.unwrap())?);

    let rates = rates_by_point(&points, cfg.chains, |&(n, e, l), c| {
        let sc = SamplerConfig { step_size: e, leapfrog_steps: l, ..sampler_config(cfg, n, chain_seed(cfg, c)) };
        Ok(phmc(m, &y, &sc, &init, cfg.score)?.acceptance_rate)
    })?;

    let mut w = csv_writer(&dir.join(OUTPUT_FILE))?;
    let particles_kind = matches!(cfg.sweep, Some(SweepSpec::Particles { .. }));
    if particles_kind {
        w.write_record(PARTICLES_HEADER)?;
    } else {
        w.write_record(GRID_HEADER)?;
    }
    let mut medians = Vec::new();
    for (&(n, e, l), r) in points.iter().zip(&rates) {
        let (med, sd, chains) = (median(r).to_string(), sample_sd(r).to_string(), r.len().to_string());
        medians.push(median(r));
        if particles_kind {
            w.write_record([n.to_string(), med, sd, chains])?;
        } else {
            w.write_record([e.to_string(), l.to_string(), med, sd, chains])?;
        }
    }
    w.flush()?;
    if particles_kind && medians.windows(2).any(|p| p[1] < p[0]) {
        log::warn!("median acceptance is not non-decreasing in N: {medians:?}");
    }
    write_manifest(&dir, "sweep", &loaded.document, cfg.seed, started.elapsed())
}

/// Data key for the dataset simulated at dimension `d`.
const DATA_KEY: u64 = 0xd1;

fn run_dimension(loaded: &LoadedConfig) -> CliResult<()> {
    let started = Instant::now();
    let cfg = &loaded.config;
    let Some(SweepSpec::Dimension { dims, kappa_mean, sigma_y, sigma_h, rho, base_step, base_leapfrog_steps }) =
        cfg.sweep.clone()
    else {
        unreachable!("caller matched the dimension sweep")
    };
    let mut problems = Problems::default();
    hamiltonian_checks(cfg, &mut problems);
    let n = problems.require("particles", &cfg.particles).copied().unwrap_or(1);
    check_filter(cfg, n, &mut problems);
    let len = problems.require("length", &cfg.length).copied().unwrap_or(1);
    problems.check(len >= 1, || "`length` must be at least 1".into());
    problems.check(!dims.is_empty() && dims.iter().all(|&d| d >= 1), || "`dims` must be non-empty and positive".into());
    problems.check(rho.abs() < 1.0 && sigma_y > 0.0 && sigma_h > 0.0, || {
        "dimension sweep truth needs |rho| < 1 and positive scales".into()
    });
    problems.check(base_step > 0.0 && base_leapfrog_steps > 0.0, || "base step settings must be positive".into());
    let dir = output_dir(loaded, &mut problems);
    problems.finish()?;
    let dir = prepare_dir(&dir.unwrap())?;

    struct Point {
        d: usize,
        model: LinearGaussianModel,
        truth: Vec<f64>,
        y: Vec<f64>,
        step_size: f64,
        leapfrog_steps: usize,
        phmc: bool,
    }
    let mut points = Vec::new();
    for &d in &dims {
        let model = lgssm(d)?;
        let mut truth = vec![kappa_mean; d];
        truth.extend([sigma_y, sigma_h, rho]);
        let (_, y) = simulate_dataset(&model, &truth, len, RngSeed(cfg.seed).derive(&[DATA_KEY, d as u64]))?;
        let quarter = ((d + 3) as f64).powf(0.25);
        let step_size = base_step / quarter;
        let leapfrog_steps = ((base_leapfrog_steps * quarter).round() as usize).max(1);
        for phmc in [true, false] {
            points.push(Point { d, model: model.clone(), truth: truth.clone(), y: y.clone(), step_size, leapfrog_steps, phmc });
        }
    }

    let rates = rates_by_point(&points, cfg.chains, |p, c| {
        let base = sampler_config(cfg, n, chain_seed(cfg, c));
        let out = if p.phmc {
            let sc = SamplerConfig { step_size: p.step_size, leapfrog_steps: p.leapfrog_steps, ..base };
            phmc(&p.model, &p.y, &sc, &p.truth, cfg.score)?
        } else {
            pmmh(&p.model, &p.y, &SamplerConfig { rw_scale: p.step_size, ..base }, &p.truth)?
        };
        Ok(out.acceptance_rate)
    })?;

    let mut w = csv_writer(&dir.join(OUTPUT_FILE))?;
    w.write_record(DIMENSION_HEADER)?;
    for (p, r) in points.iter().zip(&rates) {
        let (e, l, s) = if p.phmc {
            (p.step_size.to_string(), p.leapfrog_steps.to_string(), String::new())
        } else {
            (String::new(), String::new(), p.step_size.to_string())
        };
        w.write_record([
            if p.phmc { "phmc" } else { "pmmh" }.to_string(),
            p.d.to_string(),
            (p.d + 3).to_string(),
            e,
            l,
            s,
            median(r).to_string(),
            sample_sd(r).to_string(),
            r.len().to_string(),
        ])?;
    }
    w.flush()?;
    write_manifest(&dir, "sweep", &loaded.document, cfg.seed, started.elapsed())
}
