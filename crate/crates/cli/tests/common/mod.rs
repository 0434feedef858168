//! Helpers for driving the `phmc` binary from tests.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

pub const BIN: &str = env!("CARGO_BIN_EXE_phmc");

/// A scratch directory holding configs and run outputs.
pub struct Scratch {
    pub dir: TempDir,
}

impl Scratch {
    pub fn new() -> Self {
        Scratch { dir: tempfile::tempdir().expect("temp dir") }
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    /// Writes `doc` as `<name>.json` and returns its path.
    pub fn config(&self, name: &str, doc: &Value) -> PathBuf {
        let p = self.path(&format!("{name}.json"));
        std::fs::write(&p, serde_json::to_vec_pretty(doc).unwrap()).unwrap();
        p
    }

    /// Runs `phmc <command> -c <config> [extra..]`.
    pub fn run(&self, command: &str, config: &Path, extra: &[&str]) -> Output {
        Command::new(BIN)
            .arg(command)
            .arg("-c")
            .arg(config)
            .args(extra)
            .env("RUST_LOG", "error")
            .output()
            .expect("run phmc")
    }

    /// Like `run`, but panics with stderr unless the command succeeds.
    pub fn run_ok(&self, command: &str, config: &Path, extra: &[&str]) {
        let out = self.run(command, config, extra);
        assert!(out.status.success(), "phmc {command} failed: {}", String::from_utf8_lossy(&out.stderr));
    }
}

pub fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// A CSV file split into its header and records.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Table {
        let mut r = csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let header = r.headers().unwrap().iter().map(str::to_string).collect();
        let rows = r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect();
        Table { header, rows }
    }

    pub fn column(&self, name: &str) -> Vec<&str> {
        let i = self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[i].as_str()).collect()
    }

    pub fn numbers(&self, name: &str) -> Vec<f64> {
        self.column(name).iter().map(|v| v.parse().unwrap_or_else(|_| panic!("{name}: {v:?}"))).collect()
    }

    pub fn assert_header(&self, expected: &[&str]) {
        assert_eq!(self.header, expected);
        assert!(self.rows.iter().all(|r| r.len() == expected.len()));
    }
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

/// Every file under `dir` except the manifest, keyed by relative path.
pub fn outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        let name = entry.file_name().to_string_lossy().into_owned();
        if name != phmc_cli::output::MANIFEST {
            files.insert(name, std::fs::read(entry.path()).unwrap());
        }
    }
    files
}
