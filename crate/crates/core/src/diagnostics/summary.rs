use serde::Serialize;

use crate::error::{Error, Result};
use crate::samplers::ChainOutput;

/// Sample autocorrelation at lags `0..=max_lag`, normalized by the lag-0
/// autocovariance (both with divisor `n`).
pub fn acf(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if n <= max_lag {
        return Err(Error::InvalidArgument(format!("series of length {n} is too short for lag {max_lag}")));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let c0: f64 = dev.iter().map(|d| d * d).sum();
    if !(c0 > 0.0) {
        return Err(Error::UndefinedAcf);
    }
    Ok((0..=max_lag)
        .map(|k| dev.iter().zip(&dev[k..]).map(|(a, b)| a * b).sum::<f64>() / c0)
        .collect())
}

/// Linearly interpolated quantile of sorted data (R's type 7).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub q025: f64,
    pub q50: f64,
    pub q975: f64,
    /// `None` when the draws are constant or too few for the lag window.
    pub acf: Option<Vec<f64>>,
}

impl ParamSummary {
    pub fn covers(&self, value: f64) -> bool {
        self.q025 <= value && value <= self.q975
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSummary {
    pub params: Vec<ParamSummary>,
    pub acceptance_rate: f64,
    pub kept_draws: usize,
}

pub fn summarize_chain<S>(out: &ChainOutput<S>, names: &[String], max_lag: usize) -> Result<ChainSummary> {
    if out.draws.is_empty() {
        return Err(Error::InvalidArgument("chain has no kept draws".into()));
    }
    let dim = out.draws[0].theta.len();
    if names.len() != dim {
        return Err(Error::InvalidArgument(format!("{} names for {dim} parameters", names.len())));
    }
    let params = names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let xs = out.component(i);
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let sd = if xs.len() > 1 {
                (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            let mut sorted = xs.clone();
            sorted.sort_by(f64::total_cmp);
            ParamSummary {
                name: name.clone(),
                mean,
                sd,
                q025: quantile(&sorted, 0.025),
                q50: quantile(&sorted, 0.5),
                q975: quantile(&sorted, 0.975),
                acf: acf(&xs, max_lag).ok(),
            }
        })
        .collect();
    Ok(ChainSummary { params, acceptance_rate: out.acceptance_rate, kept_draws: out.draws.len() })
}

/// Pointwise posterior mean and 95% interval of the latent path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatentSummary {
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

pub fn summarize_latents(out: &ChainOutput<f64>) -> Result<LatentSummary> {
    let len = match out.draws.first() {
        Some(d) if !d.trajectory.is_empty() => d.trajectory.len(),
        _ => return Err(Error::InvalidArgument("chain has no kept trajectories".into())),
    };
    if out.draws.iter().any(|d| d.trajectory.len() != len) {
        return Err(Error::InvalidArgument("kept trajectories differ in length".into()));
    }
    let n = out.draws.len() as f64;
    let mut s = LatentSummary { mean: Vec::with_capacity(len), lower: Vec::with_capacity(len), upper: Vec::with_capacity(len) };
    let mut column = Vec::with_capacity(out.draws.len());
    for t in 0..len {
        column.clear();
        column.extend(out.draws.iter().map(|d| d.trajectory[t]));
        let mean = column.iter().sum::<f64>() / n;
        column.sort_by(f64::total_cmp);
        // Guard the interval against rounding in the mean.
        s.mean.push(mean.clamp(column[0], column[column.len() - 1]));
        s.lower.push(quantile(&column, 0.025));
        s.upper.push(quantile(&column, 0.975));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSeed;
    use crate::samplers::Draw;
    use rand_distr::{Distribution, StandardNormal};

    fn chain(values: &[f64], accepted: Vec<bool>) -> ChainOutput<f64> {
        let rate = accepted.iter().filter(|&&a| a).count() as f64 / accepted.len() as f64;
        ChainOutput {
            draws: values
                .iter()
                .enumerate()
                .map(|(i, &v)| Draw { iter: i + 1, theta: vec![v], trajectory: vec![v, 2.0 * v], log_z: 0.0 })
                .collect(),
            accepted,
            acceptance_rate: rate,
        }
    }

    #[test]
    fn acf_lag_zero_is_one() {
        let a = acf(&[1.0, 3.0, 2.0, 5.0, 4.0], 2).unwrap();
        assert_eq!(a[0], 1.0);
    }

    #[test]
    fn acf_alternating() {
        let xs: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let a = acf(&xs, 1).unwrap();
        assert!((a[1] + 1.0).abs() < 2.0 / 1000.0);
    }

    #[test]
    fn acf_white_noise() {
        let mut rng = RngSeed(5).rng();
        let xs: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let a = acf(&xs, 10).unwrap();
        assert!(a[1..].iter().all(|v| v.abs() < 0.02));
    }

    #[test]
    fn acf_errors() {
        assert!(matches!(acf(&[2.0; 10], 3), Err(Error::UndefinedAcf)));
        assert!(acf(&[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn constant_chain() {
        let out = chain(&[1.5; 20], vec![true; 20]);
        let s = summarize_chain(&out, &["x".into()], 5).unwrap();
        let p = &s.params[0];
        assert_eq!((p.mean, p.sd, p.q025, p.q50, p.q975), (1.5, 0.0, 1.5, 1.5, 1.5));
        assert!(p.acf.is_none());
        assert_eq!(s.acceptance_rate, 1.0);
    }

    #[test]
    fn normal_chain_moments_and_ordering() {
        let mut rng = RngSeed(6).rng();
        let xs: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let out = chain(&xs, vec![false; 10_000]);
        let s = summarize_chain(&out, &["x".into()], 3).unwrap();
        let p = &s.params[0];
        assert!(p.mean.abs() < 0.05);
        assert!(p.q025 < p.q50 && p.q50 < p.q975);
        assert_eq!(p.acf.as_ref().unwrap()[0], 1.0);
        let l = summarize_latents(&out).unwrap();
        assert_eq!(l.mean.len(), 2);
        for t in 0..2 {
            assert!(l.lower[t] <= l.mean[t] && l.mean[t] <= l.upper[t]);
        }
    }

    #[test]
    fn quantile_type7() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&xs, 1.0), 4.0);
        assert!((quantile(&xs, 0.5) - 2.5).abs() < 1e-15);
        assert!((quantile(&xs, 0.025) - 1.075).abs() < 1e-12);
    }

    #[test]
    fn empty_chain_is_rejected() {
        let out: ChainOutput<f64> = ChainOutput { draws: vec![], accepted: vec![], acceptance_rate: 0.0 };
        assert!(summarize_chain(&out, &[], 1).is_err());
        assert!(summarize_latents(&out).is_err());
    }
}
