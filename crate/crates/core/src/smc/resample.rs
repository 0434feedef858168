//! Resampling schemes. All return ancestor indices in non-decreasing order.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::weights::check_normalized;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResamplingScheme {
    #[default]
    Systematic,
    Stratified,
    Multinomial,
}

impl std::str::FromStr for ResamplingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "systematic" => Ok(Self::Systematic),
            "stratified" => Ok(Self::Stratified),
            "multinomial" => Ok(Self::Multinomial),
            other => Err(Error::InvalidArgument(format!("unknown resampling scheme {other:?}"))),
        }
    }
}

/// Draws `n` ancestor indices from normalized `weights`.
///
/// The expected number of copies of particle `i` is `n * weights[i]` under
/// every scheme.
pub fn resample<R: Rng + ?Sized>(
    weights: &[f64],
    n: usize,
    scheme: ResamplingScheme,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if weights.iter().any(|w| w.is_nan()) {
        return Err(Error::InvalidArgument("NaN resampling weight".into()));
    }
    check_normalized(weights)?;
    if n == 0 {
        return Err(Error::InvalidArgument("cannot draw zero ancestors".into()));
    }
    let step = 1.0 / n as f64;
    let points: Vec<f64> = match scheme {
        ResamplingScheme::Systematic => {
            let u: f64 = rng.random::<f64>() * step;
            return Ok(systematic_with_offset(weights, n, u));
        }
        ResamplingScheme::Stratified => {
            (0..n).map(|k| (k as f64 + rng.random::<f64>()) * step).collect()
        }
        ResamplingScheme::Multinomial => sorted_uniforms(n, rng),
    };
    Ok(invert_sorted(weights, &points))
}

/// Systematic resampling with an explicit offset `u` in `[0, 1/n)`.
pub fn systematic_with_offset(weights: &[f64], n: usize, u: f64) -> Vec<usize> {
    let step = 1.0 / n as f64;
    let points: Vec<f64> = (0..n).map(|k| u + k as f64 * step).collect();
    invert_sorted(weights, &points)
}

/// Sorted i.i.d. uniforms via normalized exponential spacings, O(n).
fn sorted_uniforms<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cum: Vec<f64> = (0..n)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            acc += e;
            acc
        })
        .collect();
    let tail: f64 = Exp1.sample(rng);
    let total = acc + tail;
    cum.iter_mut().for_each(|c| *c /= total);
    cum
}

/// Inverse-CDF lookup of sorted points in `[0, 1)`.
fn invert_sorted(weights: &[f64], points: &[f64]) -> Vec<usize> {
    // Round-off can push the last points past the final cumulative sum;
    // they go to the last particle that has any weight.
    let last = weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1);
    let mut out = Vec::with_capacity(points.len());
    let mut j = 0;
    let mut cum = weights[0];
    for &p in points {
        while p >= cum && j < last {
            j += 1;
            cum += weights[j];
        }
        out.push(j);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSeed;
    use proptest::prelude::*;

    const SCHEMES: [ResamplingScheme; 3] =
        [ResamplingScheme::Systematic, ResamplingScheme::Stratified, ResamplingScheme::Multinomial];

    #[test]
    fn point_mass_takes_everything() {
        let w = [0.0, 0.0, 0.0, 1.0, 0.0];
        let mut rng = RngSeed(1).rng();
        for scheme in SCHEMES {
            assert_eq!(resample(&w, 7, scheme, &mut rng).unwrap(), vec![3; 7]);
        }
    }

    #[test]
    fn systematic_uniform_zero_offset_is_identity() {
        let w = [1.0 / 3.0; 3];
        assert_eq!(systematic_with_offset(&w, 3, 0.0), vec![0, 1, 2]);
        let w = [0.25; 4];
        assert_eq!(systematic_with_offset(&w, 4, 0.0), vec![0, 1, 2, 3]);
    }

    #[test]
    fn rejects_nan_and_unnormalized() {
        let mut rng = RngSeed(1).rng();
        assert!(resample(&[f64::NAN, 1.0], 2, ResamplingScheme::Systematic, &mut rng).is_err());
        assert!(resample(&[0.3, 0.3], 2, ResamplingScheme::Multinomial, &mut rng).is_err());
    }

    #[test]
    fn mean_offspring_matches_weights() {
        // 1e5 repetitions; each count is within 3 standard errors of N W_i,
        // with the binomial variance N W_i (1 - W_i) as the bound.
        let w = [0.7, 0.2, 0.1];
        let n = 10;
        let reps = 100_000;
        for (s, scheme) in SCHEMES.into_iter().enumerate() {
            let mut rng = RngSeed(11).stream(&[s as u64]);
            let mut counts = [0u64; 3];
            for _ in 0..reps {
                for a in resample(&w, n, scheme, &mut rng).unwrap() {
                    counts[a] += 1;
                }
            }
            for i in 0..3 {
                let mean = counts[i] as f64 / reps as f64;
                let expected = n as f64 * w[i];
                let se = (n as f64 * w[i] * (1.0 - w[i]) / reps as f64).sqrt();
                assert!(
                    (mean - expected).abs() < 3.0 * se,
                    "{scheme:?} particle {i}: mean {mean}, expected {expected}, se {se}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn ancestors_in_range_and_positive_weight(
            raw in prop::collection::vec(0.0f64..1.0, 1..60),
            n in 1usize..80,
            seed in any::<u64>(),
        ) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-6);
            let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let mut rng = RngSeed(seed).rng();
            for scheme in SCHEMES {
                let a = resample(&w, n, scheme, &mut rng).unwrap();
                prop_assert_eq!(a.len(), n);
                prop_assert!(a.windows(2).all(|p| p[0] <= p[1]));
                prop_assert!(a.iter().all(|&i| i < w.len() && w[i] > 0.0));
            }
        }

        #[test]
        fn systematic_counts_within_one_of_expectation(
            raw in prop::collection::vec(0.01f64..1.0, 1..40),
            n in 1usize..100,
            u in 0.0f64..1.0,
        ) {
            let total: f64 = raw.iter().sum();
            let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let a = systematic_with_offset(&w, n, u / n as f64);
            let mut counts = vec![0usize; w.len()];
            for i in a { counts[i] += 1; }
            for (c, wi) in counts.iter().zip(&w) {
                prop_assert!((*c as f64 - n as f64 * wi).abs() < 1.0 + 1e-9);
            }
        }
    }
}
