//! Dataset and parameter files.
//!
//! Datasets are CSV files with header `t,y` or `t,y,h`, one row per time
//! step and `t` running 1, 2, ... Parameter files are JSON objects mapping
//! component names to reals.

use std::io::{Read, Write};
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{ObservationSeries, ParamVector};

/// Observation kind expected from a dataset file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservationKind {
    Real,
    Count,
}

/// A dataset loaded from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub y: ObservationSeries,
    /// Latent path, present for simulated datasets.
    pub h: Option<Vec<f64>>,
}

pub fn read_dataset(path: &Path, kind: ObservationKind) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    read_dataset_from(file, kind)
}

pub fn read_dataset_from<R: Read>(reader: R, kind: ObservationKind) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (t_col, y_col) = match (col("t"), col("y")) {
        (Some(t), Some(y)) => (t, y),
        _ => return Err(Error::Data("dataset header must contain `t` and `y`".into())),
    };
    let h_col = col("h");
    if let Some(extra) = headers.iter().find(|h| !matches!(*h, "t" | "y" | "h")) {
        return Err(Error::Data(format!("unexpected dataset column {extra:?}")));
    }

    let mut reals = Vec::new();
    let mut counts = Vec::new();
    let mut latents = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let line = row + 2;
        let t: usize = record[t_col]
            .parse()
            .map_err(|_| Error::Data(format!("line {line}: bad time index {:?}", &record[t_col])))?;
        if t != row + 1 {
            return Err(Error::Data(format!("line {line}: expected t = {}, found {t}", row + 1)));
        }
        let raw = &record[y_col];
        match kind {
            ObservationKind::Count => {
                let v: u64 = raw.parse().map_err(|_| {
                    Error::Data(format!("line {line}: count observation {raw:?} is not an integer >= 0"))
                })?;
                counts.push(v);
            }
            ObservationKind::Real => {
                let v: f64 = raw
                    .parse()
                    .map_err(|_| Error::Data(format!("line {line}: bad observation {raw:?}")))?;
                if !v.is_finite() {
                    return Err(Error::Data(format!("line {line}: observation is not finite")));
                }
                reals.push(v);
            }
        }
        if let Some(hc) = h_col {
            let v: f64 = record[hc]
                .parse()
                .map_err(|_| Error::Data(format!("line {line}: bad latent value {:?}", &record[hc])))?;
            latents.push(v);
        }
    }
    let y = match kind {
        ObservationKind::Count => ObservationSeries::Count(counts),
        ObservationKind::Real => ObservationSeries::Real(reals),
    };
    if y.is_empty() {
        return Err(Error::Data("dataset has no rows".into()));
    }
    Ok(Dataset { y, h: h_col.map(|_| latents) })
}

/// Writes `t,y[,h]` rows. Reals use Rust's shortest round-trip formatting.
pub fn write_dataset<W: Write>(writer: W, y: &ObservationSeries, h: Option<&[f64]>) -> Result<()> {
    if let Some(h) = h {
        if h.len() != y.len() {
            return Err(Error::InvalidArgument("latent and observation lengths differ".into()));
        }
    }
    let mut w = csv::Writer::from_writer(writer);
    if h.is_some() {
        w.write_record(["t", "y", "h"])?;
    } else {
        w.write_record(["t", "y"])?;
    }
    for t in 0..y.len() {
        let yv = match y {
            ObservationSeries::Real(v) => v[t].to_string(),
            ObservationSeries::Count(v) => v[t].to_string(),
        };
        let ts = (t + 1).to_string();
        match h {
            Some(h) => w.write_record([ts, yv, h[t].to_string()])?,
            None => w.write_record([ts, yv])?,
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_params(path: &Path, names: &[String]) -> Result<ParamVector> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    ParamVector::from_json(names, &value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_dataset_round_trip() {
        let y = ObservationSeries::Count(vec![3, 0, 12]);
        let h = [0.1, -0.25, 1.5];
        let mut buf = Vec::new();
        write_dataset(&mut buf, &y, Some(&h)).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "t,y,h\n1,3,0.1\n2,0,-0.25\n3,12,1.5\n");
        let ds = read_dataset_from(buf.as_slice(), ObservationKind::Count).unwrap();
        assert_eq!(ds.y, y);
        assert_eq!(ds.h.unwrap(), h);
    }

    #[test]
    fn rejects_non_integer_counts() {
        let err = read_dataset_from("t,y\n1,2\n2,2.5\n".as_bytes(), ObservationKind::Count);
        assert!(matches!(err, Err(Error::Data(msg)) if msg.contains("line 3")));
        let err = read_dataset_from("t,y\n1,-1\n".as_bytes(), ObservationKind::Count);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_out_of_order_time_index() {
        let err = read_dataset_from("t,y\n1,0.5\n3,0.1\n".as_bytes(), ObservationKind::Real);
        assert!(matches!(err, Err(Error::Data(_))));
    }

    #[test]
    fn rejects_missing_columns_and_empty_files() {
        assert!(read_dataset_from("time,y\n1,2\n".as_bytes(), ObservationKind::Real).is_err());
        assert!(read_dataset_from("t,y\n".as_bytes(), ObservationKind::Real).is_err());
        assert!(read_dataset_from("t,y,z\n1,2,3\n".as_bytes(), ObservationKind::Real).is_err());
    }

    #[test]
    fn params_from_json() {
        let names: Vec<String> = ["rho", "alpha"].iter().map(|s| s.to_string()).collect();
        let v = serde_json::json!({"alpha": 0.5, "rho": 0.8});
        let p = ParamVector::from_json(&names, &v).unwrap();
        assert_eq!(p.values(), &[0.8, 0.5]);
        let bad = serde_json::json!({"rho": 0.8, "beta": 1.0});
        let msg = ParamVector::from_json(&names, &bad).unwrap_err().to_string();
        assert!(msg.contains("beta") && msg.contains("alpha"), "{msg}");
    }
}
