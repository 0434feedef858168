use rand::Rng;
use serde::{Deserialize, Serialize};

use super::resample::{resample, ResamplingScheme};
use super::weights::{ess_unchecked, log_sum_exp, normalize_log_weights};
use crate::error::{Error, Result};
use crate::gradients::{score_linear, score_quadratic, ScoreEstimate, ScoreKind};
use crate::model::{check_dim, StateSpaceModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Proposal {
    /// Propagate with the transition density; weights reduce to the
    /// observation density.
    #[default]
    Bootstrap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub particles: usize,
    /// Resample when `ESS <= ess_threshold * particles`.
    pub ess_threshold: f64,
    pub resampling: ResamplingScheme,
    pub proposal: Proposal,
}

impl FilterConfig {
    pub fn new(particles: usize) -> Self {
        Self {
            particles,
            ess_threshold: 0.5,
            resampling: ResamplingScheme::Systematic,
            proposal: Proposal::Bootstrap,
        }
    }

    pub fn with_threshold(mut self, ess_threshold: f64) -> Self {
        self.ess_threshold = ess_threshold;
        self
    }

    pub fn with_scheme(mut self, scheme: ResamplingScheme) -> Self {
        self.resampling = scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.particles < 1 {
            return Err(Error::InvalidArgument("need at least one particle".into()));
        }
        if !(self.ess_threshold > 0.0 && self.ess_threshold <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "ESS threshold fraction {} is outside (0, 1]",
                self.ess_threshold
            )));
        }
        Ok(())
    }
}

/// Complete particle history of one filter run, indexed `[t][i]` with
/// `t = 0` holding the first time step.
#[derive(Debug, Clone)]
pub struct ParticleSystem<S> {
    pub particles: Vec<Vec<S>>,
    /// Unnormalized log-weights, including weight carried over from
    /// steps without resampling.
    pub log_w: Vec<Vec<f64>>,
    pub weights: Vec<Vec<f64>>,
    /// `ancestors[t][i]` indexes the particle at `t - 1` that particle `i`
    /// at `t` was propagated from. Identity at `t = 0` and at steps
    /// without resampling.
    pub ancestors: Vec<Vec<usize>>,
    /// Whether ancestors at `t` were drawn by resampling.
    pub resampled: Vec<bool>,
    pub ess: Vec<f64>,
}

impl<S> ParticleSystem<S> {
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn particle_count(&self) -> usize {
        self.particles.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone)]
pub struct FilterResult<S> {
    /// Log of the unbiased marginal-likelihood estimate.
    pub log_z: f64,
    /// One latent path drawn from the particle approximation of the
    /// smoothing distribution.
    pub trajectory: Vec<S>,
    pub system: ParticleSystem<S>,
    pub score: Option<ScoreEstimate>,
}

/// Runs the bootstrap particle filter on `y` at `theta`.
///
/// When `want_score` is set, the matching score estimator runs on the
/// completed particle system.
pub fn run_filter<M, R>(
    model: &M,
    theta: &[f64],
    y: &[M::Obs],
    cfg: &FilterConfig,
    rng: &mut R,
    want_score: Option<ScoreKind>,
) -> Result<FilterResult<M::State>>
where
    M: StateSpaceModel,
    R: Rng + ?Sized,
{
    cfg.validate()?;
    check_dim(theta, model.dim())?;
    if !model.in_support(theta) {
        return Err(Error::Domain(format!("filter called at {theta:?}")));
    }
    if y.is_empty() {
        return Err(Error::InvalidArgument("empty observation series".into()));
    }
    let n = cfg.particles;
    let len = y.len();
    let log_n = (n as f64).ln();

    let mut sys = ParticleSystem {
        particles: Vec::with_capacity(len),
        log_w: Vec::with_capacity(len),
        weights: Vec::with_capacity(len),
        ancestors: Vec::with_capacity(len),
        resampled: Vec::with_capacity(len),
        ess: Vec::with_capacity(len),
    };
    let identity: Vec<usize> = (0..n).collect();
    let mut log_z = 0.0;
    let mut prev_lse = f64::NAN;

    for t in 0..len {
        let (states, ancestors, resampled, carried): (Vec<M::State>, Vec<usize>, bool, Option<&[f64]>) =
            if t == 0 {
                let s = (0..n).map(|_| model.sample_init(theta, rng)).collect();
                (s, identity.clone(), false, None)
            } else {
                let prev_w = &sys.weights[t - 1];
                let prev = &sys.particles[t - 1];
                let do_resample = sys.ess[t - 1] <= cfg.ess_threshold * n as f64;
                let anc = if do_resample {
                    resample(prev_w, n, cfg.resampling, rng)?
                } else {
                    identity.clone()
                };
                let s = anc.iter().map(|&a| model.sample_trans(theta, &prev[a], rng)).collect();
                let carried = if do_resample { None } else { Some(sys.log_w[t - 1].as_slice()) };
                (s, anc, do_resample, carried)
            };

        let obs = &y[t];
        let log_w: Vec<f64> = match carried {
            None => states.iter().map(|h| model.log_obs(theta, obs, h)).collect(),
            Some(c) => states.iter().zip(c).map(|(h, lw)| model.log_obs(theta, obs, h) + lw).collect(),
        };
        let mut w = Vec::with_capacity(n);
        let lse = normalize_log_weights(&log_w, &mut w);
        if !lse.is_finite() {
            return Err(Error::DegenerateFilter { t: t + 1 });
        }
        log_z += increment(lse, prev_lse, log_n, t == 0 || resampled);
        prev_lse = lse;

        sys.ess.push(ess_unchecked(&w));
        sys.particles.push(states);
        sys.log_w.push(log_w);
        sys.weights.push(w);
        sys.ancestors.push(ancestors);
        sys.resampled.push(resampled);
    }

    let trajectory = trace_path(&sys, rng);
    let score = match want_score {
        None => None,
        Some(ScoreKind::Linear) => Some(score_linear(model, theta, &sys, y)?),
        Some(ScoreKind::Quadratic) => Some(score_quadratic(model, theta, &sys, y)?),
    };
    Ok(FilterResult { log_z, trajectory, system: sys, score })
}

#[inline]
fn increment(lse: f64, prev_lse: f64, log_n: f64, fresh: bool) -> f64 {
    if fresh {
        lse - log_n
    } else {
        lse - prev_lse
    }
}

/// Per-step log-likelihood increments `log l_t`; their sum is the filter's
/// `log_z`.
pub fn log_marginal_increments<S>(system: &ParticleSystem<S>) -> Vec<f64> {
    let log_n = (system.particle_count() as f64).ln();
    let mut prev = f64::NAN;
    system
        .log_w
        .iter()
        .zip(&system.resampled)
        .enumerate()
        .map(|(t, (lw, &res))| {
            let lse = log_sum_exp(lw);
            let inc = increment(lse, prev, log_n, t == 0 || res);
            prev = lse;
            inc
        })
        .collect()
}

/// Draws `b_T ~ Categorical(W_T)` and follows ancestor links backwards.
fn trace_path<S: Copy, R: Rng + ?Sized>(sys: &ParticleSystem<S>, rng: &mut R) -> Vec<S> {
    let len = sys.len();
    let last = &sys.weights[len - 1];
    let u: f64 = rng.random();
    let mut cum = 0.0;
    let top = last.iter().rposition(|&w| w > 0.0).unwrap_or(0);
    let mut b = top;
    for (i, &w) in last.iter().enumerate() {
        cum += w;
        if u < cum {
            b = i.min(top);
            break;
        }
    }
    let mut path = vec![sys.particles[len - 1][b]; len];
    for t in (1..len).rev() {
        b = sys.ancestors[t][b];
        path[t - 1] = sys.particles[t - 1][b];
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{simulate_dataset, LinearGaussianModel, PoissonCountModel};
    use crate::rng::RngSeed;

    fn lgssm_data(len: usize) -> (LinearGaussianModel, Vec<f64>, Vec<f64>) {
        let m = LinearGaussianModel::new(1).unwrap();
        let theta = vec![0.5, 0.25, 0.2, 0.8];
        let (_, y) = simulate_dataset(&m, &theta, len, RngSeed(5)).unwrap();
        (m, theta, y)
    }

    #[test]
    fn single_particle_single_step() {
        let (m, theta, y) = lgssm_data(1);
        let cfg = FilterConfig::new(1);
        let out = run_filter(&m, &theta, &y, &cfg, &mut RngSeed(3).rng(), None).unwrap();
        // Replay the one initial draw from the same stream.
        let h1 = m.sample_init(&theta, &mut RngSeed(3).rng());
        assert_eq!(out.system.particles[0][0], h1);
        assert_eq!(out.log_z, m.log_obs(&theta, &y[0], &h1));
        assert_eq!(out.trajectory, vec![h1]);
    }

    #[test]
    fn two_particle_increment_is_log_mean_weight() {
        let (m, theta, y) = lgssm_data(1);
        let out = run_filter(&m, &theta, &y, &FilterConfig::new(2), &mut RngSeed(8).rng(), None).unwrap();
        let a = out.system.log_w[0][0].exp();
        let b = out.system.log_w[0][1].exp();
        assert!((out.log_z - ((a + b) / 2.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn increments_sum_to_log_z_exactly() {
        let (m, theta, y) = lgssm_data(40);
        for threshold in [0.3, 0.5, 1.0] {
            let cfg = FilterConfig::new(64).with_threshold(threshold);
            let out = run_filter(&m, &theta, &y, &cfg, &mut RngSeed(2).rng(), None).unwrap();
            let inc = log_marginal_increments(&out.system);
            assert_eq!(inc.len(), 40);
            assert_eq!(inc.iter().sum::<f64>(), out.log_z);
        }
    }

    #[test]
    fn system_invariants_hold() {
        let m = PoissonCountModel::new();
        let theta = [0.8, 0.5, 0.2];
        let (_, y) = simulate_dataset(&m, &theta, 60, RngSeed(1)).unwrap();
        let out = run_filter(&m, &theta, &y, &FilterConfig::new(100), &mut RngSeed(2).rng(), None).unwrap();
        let sys = &out.system;
        assert!(!sys.resampled[0]);
        for t in 0..sys.len() {
            let total: f64 = sys.weights[t].iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(sys.ess[t] >= 1.0 - 1e-9 && sys.ess[t] <= 100.0 + 1e-9);
            if !sys.resampled[t] {
                assert!(sys.ancestors[t].iter().enumerate().all(|(i, &a)| a == i));
            }
            if t > 0 {
                assert_eq!(sys.resampled[t], sys.ess[t - 1] <= 50.0);
            }
        }
        assert!(sys.resampled.iter().any(|&r| r));
    }

    #[test]
    fn threshold_one_resamples_unless_uniform() {
        let (m, theta, y) = lgssm_data(30);
        let cfg = FilterConfig::new(50).with_threshold(1.0);
        let out = run_filter(&m, &theta, &y, &cfg, &mut RngSeed(4).rng(), None).unwrap();
        assert!(out.system.resampled[1..].iter().all(|&r| r));
    }

    #[test]
    fn trajectory_follows_ancestry() {
        let (m, theta, y) = lgssm_data(25);
        let out = run_filter(&m, &theta, &y, &FilterConfig::new(30), &mut RngSeed(6).rng(), None).unwrap();
        let sys = &out.system;
        // Recover each index by value, then check every link.
        let idx: Vec<usize> = out
            .trajectory
            .iter()
            .enumerate()
            .map(|(t, h)| sys.particles[t].iter().position(|p| p == h).unwrap())
            .collect();
        for t in 1..sys.len() {
            assert_eq!(sys.ancestors[t][idx[t]], idx[t - 1]);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let (m, theta, y) = lgssm_data(20);
        let cfg = FilterConfig::new(40);
        let a = run_filter(&m, &theta, &y, &cfg, &mut RngSeed(9).rng(), Some(ScoreKind::Quadratic)).unwrap();
        let b = run_filter(&m, &theta, &y, &cfg, &mut RngSeed(9).rng(), Some(ScoreKind::Quadratic)).unwrap();
        assert_eq!(a.log_z.to_bits(), b.log_z.to_bits());
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.score.unwrap().score, b.score.unwrap().score);
    }

    #[test]
    fn degenerate_weights_report_time() {
        // An observation so far out that every log-weight overflows to -inf.
        let m = LinearGaussianModel::new(1).unwrap();
        let theta = [0.0, 1e-3, 0.1, 0.5];
        let y = [0.0, 0.0, 1e200];
        let err = run_filter(&m, &theta, &y, &FilterConfig::new(10), &mut RngSeed(1).rng(), None);
        assert!(matches!(err, Err(Error::DegenerateFilter { t: 3 })), "{err:?}");
    }

    #[test]
    fn rejects_unsupported_theta_and_bad_config() {
        let (m, _, y) = lgssm_data(5);
        let err = run_filter(&m, &[0.0, 0.2, 0.2, 1.0], &y, &FilterConfig::new(10), &mut RngSeed(1).rng(), None);
        assert!(matches!(err, Err(Error::Domain(_))));
        let cfg = FilterConfig::new(10).with_threshold(0.0);
        assert!(run_filter(&m, &[0.0, 0.2, 0.2, 0.5], &y, &cfg, &mut RngSeed(1).rng(), None).is_err());
    }
}
