use rand::Rng;

use super::ar1::Ar1;
use super::prior::{
    grad_log_normal, log_normal, log_uniform_pm1, sample_normal, GammaPrecision, HALF_LN_2PI,
};
use super::StateSpaceModel;
use crate::error::{Error, Result};

/// Linear-Gaussian model whose latent drift is the average of `d` shift
/// parameters:
///
/// ```text
/// Y_t | h_t     ~ N(h_t, sigma_y^2)
/// H_t | h_{t-1} ~ N(rho h_{t-1} + mean(kappa), sigma_h^2)
/// H_1           ~ N(0, sigma_h^2 / (1 - rho^2))
/// ```
///
/// Parameters are ordered `(kappa_1, ..., kappa_d, sigma_y, sigma_h, rho)`.
/// Only `mean(kappa)` is identified by the data; the individual shifts are
/// held in place by their `N(0, 10^2)` priors.
#[derive(Debug, Clone)]
pub struct LinearGaussianModel {
    d: usize,
    names: Vec<String>,
    kappa_prior_sd: f64,
    sigma_prior: GammaPrecision,
}

impl LinearGaussianModel {
    pub fn new(d: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidArgument("LGSSM needs at least one shift parameter".into()));
        }
        let mut names: Vec<String> = (1..=d).map(|j| format!("kappa_{j}")).collect();
        names.extend(["sigma_y", "sigma_h", "rho"].iter().map(|s| s.to_string()));
        Ok(Self {
            d,
            names,
            kappa_prior_sd: 10.0,
            sigma_prior: GammaPrecision { shape: 0.01, rate: 0.01 },
        })
    }

    /// Number of shift parameters.
    pub fn shifts(&self) -> usize {
        self.d
    }

    pub fn sigma_y_index(&self) -> usize {
        self.d
    }

    pub fn sigma_h_index(&self) -> usize {
        self.d + 1
    }

    pub fn rho_index(&self) -> usize {
        self.d + 2
    }

    /// `mean(kappa)`, the constant drift of the latent chain.
    pub fn drift(&self, theta: &[f64]) -> f64 {
        theta[..self.d].iter().sum::<f64>() / self.d as f64
    }

    #[inline]
    fn dynamics(&self, theta: &[f64]) -> Ar1 {
        Ar1 { rho: theta[self.d + 2], drift: self.drift(theta), sigma: theta[self.d + 1] }
    }

    fn scatter(&self, g: super::ar1::Ar1Grad, out: &mut [f64]) {
        if g.drift != 0.0 {
            let per_shift = g.drift / self.d as f64;
            for o in &mut out[..self.d] {
                *o += per_shift;
            }
        }
        out[self.d + 1] += g.sigma;
        out[self.d + 2] += g.rho;
    }
}

impl StateSpaceModel for LinearGaussianModel {
    type State = f64;
    type Obs = f64;

    fn name(&self) -> &str {
        "lgssm"
    }

    fn param_names(&self) -> &[String] {
        &self.names
    }

    fn in_support(&self, theta: &[f64]) -> bool {
        theta.len() == self.d + 3
            && theta.iter().all(|v| v.is_finite())
            && theta[self.d] > 0.0
            && theta[self.d + 1] > 0.0
            && theta[self.d + 2].abs() < 1.0
    }

    fn log_prior(&self, theta: &[f64]) -> f64 {
        if !self.in_support(theta) {
            return f64::NEG_INFINITY;
        }
        let kappa: f64 = theta[..self.d].iter().map(|&k| log_normal(k, 0.0, self.kappa_prior_sd)).sum();
        kappa
            + self.sigma_prior.log_density(theta[self.d])
            + self.sigma_prior.log_density(theta[self.d + 1])
            + log_uniform_pm1(theta[self.d + 2])
    }

    fn add_grad_log_prior(&self, theta: &[f64], out: &mut [f64]) {
        for (o, &k) in out[..self.d].iter_mut().zip(&theta[..self.d]) {
            *o += grad_log_normal(k, 0.0, self.kappa_prior_sd);
        }
        out[self.d] += self.sigma_prior.grad_log_density(theta[self.d]);
        out[self.d + 1] += self.sigma_prior.grad_log_density(theta[self.d + 1]);
    }

    fn sample_prior<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut theta: Vec<f64> =
            (0..self.d).map(|_| sample_normal(rng, 0.0, self.kappa_prior_sd)).collect();
        theta.push(self.sigma_prior.sample(rng));
        theta.push(self.sigma_prior.sample(rng));
        let rho = loop {
            let u: f64 = rng.random_range(-1.0..1.0);
            if u.abs() < 1.0 {
                break u;
            }
        };
        theta.push(rho);
        theta
    }

    fn log_init(&self, theta: &[f64], h: &f64) -> f64 {
        self.dynamics(theta).log_init(*h)
    }

    fn log_trans(&self, theta: &[f64], h: &f64, h_prev: &f64) -> f64 {
        self.dynamics(theta).log_trans(*h, *h_prev)
    }

    fn log_obs(&self, theta: &[f64], y: &f64, h: &f64) -> f64 {
        let sigma_y = theta[self.d];
        let z = (y - h) / sigma_y;
        -sigma_y.ln() - HALF_LN_2PI - 0.5 * z * z
    }

    fn sample_init<R: Rng + ?Sized>(&self, theta: &[f64], rng: &mut R) -> f64 {
        self.dynamics(theta).sample_init(rng)
    }

    fn sample_trans<R: Rng + ?Sized>(&self, theta: &[f64], h_prev: &f64, rng: &mut R) -> f64 {
        self.dynamics(theta).sample_trans(*h_prev, rng)
    }

    fn sample_obs<R: Rng + ?Sized>(&self, theta: &[f64], h: &f64, rng: &mut R) -> f64 {
        sample_normal(rng, *h, theta[self.d])
    }

    fn add_grad_log_init(&self, theta: &[f64], h: &f64, out: &mut [f64]) {
        let g = self.dynamics(theta).grad_log_init(*h);
        self.scatter(g, out);
    }

    fn add_grad_log_trans(&self, theta: &[f64], h: &f64, h_prev: &f64, out: &mut [f64]) {
        let g = self.dynamics(theta).grad_log_trans(*h, *h_prev);
        self.scatter(g, out);
    }

    fn add_grad_log_obs(&self, theta: &[f64], y: &f64, h: &f64, out: &mut [f64]) {
        let sigma_y = theta[self.d];
        let r = y - h;
        out[self.d] += -1.0 / sigma_y + r * r / (sigma_y * sigma_y * sigma_y);
    }

    fn log_trans_many(&self, theta: &[f64], h: &f64, prevs: &[f64], out: &mut [f64]) {
        self.dynamics(theta).log_trans_many(*h, prevs, out);
    }

    fn add_weighted_grad_log_trans(
        &self,
        theta: &[f64],
        h: &f64,
        prevs: &[f64],
        weights: &[f64],
        out: &mut [f64],
    ) {
        let g = self.dynamics(theta).weighted_grad_log_trans(*h, prevs, weights);
        self.scatter(g, out);
    }
}
