use std::time::Instant;

use phmc_core::io::write_dataset;
use phmc_core::model::{simulate_dataset, ParamVector};
use phmc_core::rng::RngSeed;
use serde_json::json;

use super::{output_dir, params};
use crate::config::{LoadedConfig, Problems};
use crate::error::CliResult;
use crate::models::{model_name, with_model, CliModel};
use crate::output::{prepare_dir, write_json, write_manifest};

pub const DATA_FILE: &str = "data.csv";
pub const TRUTH_FILE: &str = "truth.json";

/// Writes `data.csv` (`t,y,h`) and `truth.json` (model, parameters, seed).
pub fn simulate(loaded: &LoadedConfig) -> CliResult<()> {
    with_model!(loaded.config.model, m => run(&m, loaded))
}

fn run<M: CliModel>(m: &M, loaded: &LoadedConfig) -> CliResult<()> {
    let started = Instant::now();
    let cfg = &loaded.config;
    let mut problems = Problems::default();
    let theta = params(m, "theta", cfg.theta.as_ref(), &mut problems);
    let len = problems.require("length", &cfg.length).copied();
    problems.check(len != Some(0), || "`length` must be at least 1".into());
    let dir = output_dir(loaded, &mut problems);
    problems.finish()?;
    let (theta, len, dir) = (theta.unwrap(), len.unwrap(), prepare_dir(&dir.unwrap())?);

    let (h, y) = simulate_dataset(m, &theta, len, RngSeed(cfg.seed))?;
    write_dataset(std::fs::File::create(dir.join(DATA_FILE))?, &M::series(y), Some(&h))?;
    let truth = ParamVector::for_model(m, theta)?;
    write_json(
        &dir.join(TRUTH_FILE),
        &json!({"model": model_name(cfg.model), "theta": truth.to_json(), "seed": cfg.seed, "length": len}),
    )?;
    write_manifest(&dir, "simulate", &loaded.document, cfg.seed, started.elapsed())
}
