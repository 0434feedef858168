//! Leapfrog integration and the three Markov chain samplers.
//!
//! * [`hmc`] targets a density with an exactly computable gradient.
//! * [`pmmh`] is a Gaussian random walk driven by particle likelihood
//!   estimates.
//! * [`phmc`] runs leapfrog trajectories on particle estimates of the
//!   log-posterior and its gradient, accepting with the estimated
//!   Hamiltonian.
//!
//! All samplers use an identity mass matrix and compute acceptance
//! probabilities in the log domain.

mod hmc;
mod leapfrog;
mod phmc;
mod pmmh;

pub use hmc::hmc;
pub use leapfrog::{hamiltonian, kinetic_energy, leapfrog, leapfrog_from, HamiltonianValue, LeapfrogPath, PhasePoint};
pub use phmc::phmc;
pub use pmmh::{pmmh, pmmh_step, PmmhState};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::smc::FilterConfig;

/// Divergence guard: a trajectory whose potential moves further than
/// this from its starting value is abandoned and the iteration rejected.
pub const MAX_POTENTIAL_CHANGE: f64 = 1e6;

/// Stream roles under a chain's seed.
pub(crate) mod stream {
    pub const MOMENTUM: u64 = 1;
    pub const PROPOSAL: u64 = 2;
    pub const ACCEPT: u64 = 3;
    pub const FILTER: u64 = 4;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Total iterations `K`, burn-in included.
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// Leapfrog steps `L` per iteration.
    pub leapfrog_steps: usize,
    /// Leapfrog step size.
    pub step_size: f64,
    /// Standard deviation of each random-walk proposal increment.
    pub rw_scale: f64,
    pub filter: FilterConfig,
    pub seed: RngSeed,
    /// Carry the accepted likelihood estimate into the next particle HMC
    /// iteration instead of re-estimating it at the current point.
    #[serde(default)]
    pub reuse_current_loglik: bool,
}

impl SamplerConfig {
    pub fn new(iterations: usize, particles: usize, seed: RngSeed) -> Self {
        Self {
            iterations,
            burn_in: 0,
            thin: 1,
            leapfrog_steps: 1,
            step_size: 0.1,
            rw_scale: 0.1,
            filter: FilterConfig::new(particles),
            seed,
            reuse_current_loglik: false,
        }
    }

    /// Every violated constraint, one message each.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.iterations <= self.burn_in {
            out.push(format!(
                "iterations ({}) must exceed burn_in ({})",
                self.iterations, self.burn_in
            ));
        }
        if self.thin < 1 {
            out.push("thin must be at least 1".into());
        }
        if self.leapfrog_steps < 1 {
            out.push("leapfrog_steps must be at least 1".into());
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            out.push(format!("step_size must be positive, got {}", self.step_size));
        }
        if !(self.rw_scale >= 0.0 && self.rw_scale.is_finite()) {
            out.push(format!("rw_scale must be non-negative, got {}", self.rw_scale));
        }
        if let Err(e) = self.filter.validate() {
            out.push(e.to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(problems.join("; ")))
        }
    }

    /// Whether 1-based iteration `k` is retained.
    pub fn keeps(&self, k: usize) -> bool {
        k > self.burn_in && (k - self.burn_in).is_multiple_of(self.thin)
    }

    pub fn kept_count(&self) -> usize {
        self.iterations.saturating_sub(self.burn_in) / self.thin.max(1)
    }
}

/// One retained chain state.
#[derive(Debug, Clone, PartialEq)]
pub struct Draw<S> {
    /// 1-based iteration index.
    pub iter: usize,
    pub theta: Vec<f64>,
    /// Latent path attached to the state; empty for [`hmc`].
    pub trajectory: Vec<S>,
    /// Log-likelihood estimate attached to the state. For [`hmc`] this is
    /// the log target density.
    pub log_z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput<S> {
    pub draws: Vec<Draw<S>>,
    /// Acceptance indicator for every iteration, burn-in included.
    pub accepted: Vec<bool>,
    pub acceptance_rate: f64,
}

impl<S> ChainOutput<S> {
    fn with_capacity(cfg: &SamplerConfig) -> Self {
        Self {
            draws: Vec::with_capacity(cfg.kept_count()),
            accepted: Vec::with_capacity(cfg.iterations),
            acceptance_rate: 0.0,
        }
    }

    fn record(&mut self, cfg: &SamplerConfig, k: usize, accepted: bool, draw: impl FnOnce() -> Draw<S>) {
        self.accepted.push(accepted);
        if cfg.keeps(k) {
            self.draws.push(draw());
        }
    }

    fn finish(mut self) -> Self {
        let n = self.accepted.len().max(1) as f64;
        self.acceptance_rate = self.accepted.iter().filter(|&&a| a).count() as f64 / n;
        self
    }

    /// Values of parameter component `i` across kept draws.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.draws.iter().map(|d| d.theta[i]).collect()
    }
}

pub(crate) fn standard_normal_vec<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Metropolis test on a log acceptance ratio.
pub(crate) fn accept<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> bool {
    if log_ratio.is_nan() {
        return false;
    }
    let u: f64 = rng.random();
    log_ratio >= 0.0 || u.ln() < log_ratio
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windowing_arithmetic() {
        let mut cfg = SamplerConfig::new(10, 10, RngSeed(0));
        cfg.burn_in = 9;
        assert_eq!(cfg.kept_count(), 1);
        assert_eq!((1..=10).filter(|&k| cfg.keeps(k)).count(), 1);
        cfg.burn_in = 3;
        cfg.thin = 3;
        assert_eq!(cfg.kept_count(), 2);
        assert_eq!((1..=10).filter(|&k| cfg.keeps(k)).collect::<Vec<_>>(), vec![6, 9]);
    }

    #[test]
    fn validation_lists_every_problem() {
        let mut cfg = SamplerConfig::new(5, 0, RngSeed(0));
        cfg.burn_in = 5;
        cfg.thin = 0;
        cfg.leapfrog_steps = 0;
        cfg.step_size = -1.0;
        assert_eq!(cfg.problems().len(), 5);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn accept_handles_extremes() {
        let mut rng = RngSeed(1).rng();
        assert!(accept(0.0, &mut rng));
        assert!(accept(f64::INFINITY, &mut rng));
        assert!(!accept(f64::NEG_INFINITY, &mut rng));
        assert!(!accept(f64::NAN, &mut rng));
    }
}
