use std::sync::OnceLock;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use statrs::function::gamma::ln_gamma;

use super::ar1::Ar1;
use super::prior::{grad_log_normal, log_normal, log_uniform_pm1, sample_normal, GammaPrecision};
use super::StateSpaceModel;

const RHO: usize = 0;

/// `ln(y!)`, tabulated for small counts.
fn ln_factorial(y: u64) -> f64 {
    const TABLE_LEN: usize = 1024;
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| (0..TABLE_LEN).map(|k| ln_gamma(k as f64 + 1.0)).collect());
    match table.get(y as usize) {
        Some(v) => *v,
        None => ln_gamma(y as f64 + 1.0),
    }
}
const ALPHA: usize = 1;
const SIGMA_H: usize = 2;

/// Poisson counts driven by a stationary Gaussian AR(1) log-intensity:
///
/// ```text
/// Y_t | h_t     ~ Poisson(exp(h_t + alpha))
/// H_t | h_{t-1} ~ N(rho h_{t-1}, sigma_h^2)
/// H_1           ~ N(0, sigma_h^2 / (1 - rho^2))
/// ```
///
/// Parameters are ordered `(rho, alpha, sigma_h)` with priors
/// `rho ~ U[-1, 1]`, `alpha ~ N(0, 10^2)`, `1/sigma_h^2 ~ Gamma(0.01, 0.01)`.
#[derive(Debug, Clone)]
pub struct PoissonCountModel {
    names: Vec<String>,
    alpha_prior_mean: f64,
    alpha_prior_sd: f64,
    sigma_prior: GammaPrecision,
}

impl Default for PoissonCountModel {
    fn default() -> Self {
        Self::new()
    }
}

impl PoissonCountModel {
    pub fn new() -> Self {
        Self {
            names: ["rho", "alpha", "sigma_h"].iter().map(|s| s.to_string()).collect(),
            alpha_prior_mean: 0.0,
            alpha_prior_sd: 10.0,
            sigma_prior: GammaPrecision { shape: 0.01, rate: 0.01 },
        }
    }

    #[inline]
    fn dynamics(theta: &[f64]) -> Ar1 {
        Ar1 { rho: theta[RHO], drift: 0.0, sigma: theta[SIGMA_H] }
    }
}

impl StateSpaceModel for PoissonCountModel {
    type State = f64;
    type Obs = u64;

    fn name(&self) -> &str {
        "poisson"
    }

    fn param_names(&self) -> &[String] {
        &self.names
    }

    fn in_support(&self, theta: &[f64]) -> bool {
        theta.len() == 3
            && theta.iter().all(|v| v.is_finite())
            && theta[RHO].abs() < 1.0
            && theta[SIGMA_H] > 0.0
    }

    fn log_prior(&self, theta: &[f64]) -> f64 {
        if !self.in_support(theta) {
            return f64::NEG_INFINITY;
        }
        log_uniform_pm1(theta[RHO])
            + log_normal(theta[ALPHA], self.alpha_prior_mean, self.alpha_prior_sd)
            + self.sigma_prior.log_density(theta[SIGMA_H])
    }

    fn add_grad_log_prior(&self, theta: &[f64], out: &mut [f64]) {
        out[ALPHA] += grad_log_normal(theta[ALPHA], self.alpha_prior_mean, self.alpha_prior_sd);
        out[SIGMA_H] += self.sigma_prior.grad_log_density(theta[SIGMA_H]);
    }

    fn sample_prior<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        // Open interval: a draw of exactly -1 is re-drawn.
        let rho = loop {
            let u: f64 = rng.random_range(-1.0..1.0);
            if u.abs() < 1.0 {
                break u;
            }
        };
        let alpha = sample_normal(rng, self.alpha_prior_mean, self.alpha_prior_sd);
        vec![rho, alpha, self.sigma_prior.sample(rng)]
    }

    fn log_init(&self, theta: &[f64], h: &f64) -> f64 {
        Self::dynamics(theta).log_init(*h)
    }

    fn log_trans(&self, theta: &[f64], h: &f64, h_prev: &f64) -> f64 {
        Self::dynamics(theta).log_trans(*h, *h_prev)
    }

    fn log_obs(&self, theta: &[f64], y: &u64, h: &f64) -> f64 {
        let eta = h + theta[ALPHA];
        *y as f64 * eta - eta.exp() - ln_factorial(*y)
    }

    fn sample_init<R: Rng + ?Sized>(&self, theta: &[f64], rng: &mut R) -> f64 {
        Self::dynamics(theta).sample_init(rng)
    }

    fn sample_trans<R: Rng + ?Sized>(&self, theta: &[f64], h_prev: &f64, rng: &mut R) -> f64 {
        Self::dynamics(theta).sample_trans(*h_prev, rng)
    }

    fn sample_obs<R: Rng + ?Sized>(&self, theta: &[f64], h: &f64, rng: &mut R) -> u64 {
        let rate = (h + theta[ALPHA]).exp();
        if rate <= 0.0 {
            return 0;
        }
        // Poisson::new rejects rates above ~1.8e19; such rates only arise
        // from latent paths that have already left any sensible range.
        let rate = rate.min(1e18);
        Poisson::new(rate).expect("finite positive rate").sample(rng) as u64
    }

    fn add_grad_log_init(&self, theta: &[f64], h: &f64, out: &mut [f64]) {
        let g = Self::dynamics(theta).grad_log_init(*h);
        out[RHO] += g.rho;
        out[SIGMA_H] += g.sigma;
    }

    fn add_grad_log_trans(&self, theta: &[f64], h: &f64, h_prev: &f64, out: &mut [f64]) {
        let g = Self::dynamics(theta).grad_log_trans(*h, *h_prev);
        out[RHO] += g.rho;
        out[SIGMA_H] += g.sigma;
    }

    fn add_grad_log_obs(&self, theta: &[f64], y: &u64, h: &f64, out: &mut [f64]) {
        out[ALPHA] += *y as f64 - (h + theta[ALPHA]).exp();
    }

    fn log_trans_many(&self, theta: &[f64], h: &f64, prevs: &[f64], out: &mut [f64]) {
        Self::dynamics(theta).log_trans_many(*h, prevs, out);
    }

    fn add_weighted_grad_log_trans(
        &self,
        theta: &[f64],
        h: &f64,
        prevs: &[f64],
        weights: &[f64],
        out: &mut [f64],
    ) {
        let g = Self::dynamics(theta).weighted_grad_log_trans(*h, prevs, weights);
        out[RHO] += g.rho;
        out[SIGMA_H] += g.sigma;
    }
}
