//! Output files shared by all commands.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

pub const MANIFEST: &str = "manifest.json";

/// Creates `dir` and returns it.
pub fn prepare_dir(dir: &Path) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir)?;
    Ok(dir.to_path_buf())
}

pub fn csv_writer(path: &Path) -> CliResult<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(path)?)))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// SHA-256 of the compact serialization of the effective config.
pub fn config_hash(document: &Value) -> String {
    hex::encode(Sha256::digest(document.to_string().as_bytes()))
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config_hash: String,
    seed: u64,
    version: &'a str,
    wall_clock_seconds: f64,
    config: &'a Value,
}

/// Writes `manifest.json`. Its `wall_clock_seconds` is the only output
/// field that differs between identical reruns.
pub fn write_manifest(dir: &Path, command: &str, document: &Value, seed: u64, elapsed: Duration) -> CliResult<()> {
    let m = Manifest {
        command,
        config_hash: config_hash(document),
        seed,
        version: env!("CARGO_PKG_VERSION"),
        wall_clock_seconds: elapsed.as_secs_f64(),
        config: document,
    };
    write_json(&dir.join(MANIFEST), &m)
}

/// Median of unsorted values; mean of the middle pair for even counts.
pub fn median(xs: &[f64]) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Unbiased sample variance; zero for fewer than two values.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

pub fn sample_sd(xs: &[f64]) -> f64 {
    sample_variance(xs).sqrt()
}
