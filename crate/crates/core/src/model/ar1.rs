//! Stationary Gaussian AR(1) latent dynamics shared by both models:
//! `H_1 ~ N(0, sigma^2 / (1 - rho^2))`, `H_t | h ~ N(rho h + drift, sigma^2)`.

use super::prior::{sample_normal, HALF_LN_2PI};
use rand::Rng;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Ar1 {
    pub rho: f64,
    pub drift: f64,
    pub sigma: f64,
}

/// Parameter gradient of an AR(1) log-density, by coordinate.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Ar1Grad {
    pub rho: f64,
    pub sigma: f64,
    pub drift: f64,
}

impl Ar1 {
    pub fn log_init(&self, h: f64) -> f64 {
        let one_m = 1.0 - self.rho * self.rho;
        -self.sigma.ln() + 0.5 * one_m.ln() - HALF_LN_2PI
            - 0.5 * h * h * one_m / (self.sigma * self.sigma)
    }

    pub fn grad_log_init(&self, h: f64) -> Ar1Grad {
        let (rho, s) = (self.rho, self.sigma);
        let s2 = s * s;
        Ar1Grad {
            rho: h * h * rho / s2 - rho / (1.0 - rho * rho),
            sigma: -1.0 / s + h * h * (1.0 - rho * rho) / (s2 * s),
            drift: 0.0,
        }
    }

    #[inline]
    pub fn residual(&self, h: f64, h_prev: f64) -> f64 {
        h - self.drift - self.rho * h_prev
    }

    pub fn log_trans(&self, h: f64, h_prev: f64) -> f64 {
        let z = self.residual(h, h_prev) / self.sigma;
        -self.sigma.ln() - HALF_LN_2PI - 0.5 * z * z
    }

    pub fn grad_log_trans(&self, h: f64, h_prev: f64) -> Ar1Grad {
        let r = self.residual(h, h_prev);
        let s2 = self.sigma * self.sigma;
        Ar1Grad {
            rho: h_prev * r / s2,
            sigma: -1.0 / self.sigma + r * r / (s2 * self.sigma),
            drift: r / s2,
        }
    }

    pub fn log_trans_many(&self, h: f64, prevs: &[f64], out: &mut [f64]) {
        let c = -self.sigma.ln() - HALF_LN_2PI;
        let half_prec = 0.5 / (self.sigma * self.sigma);
        for (o, &p) in out.iter_mut().zip(prevs) {
            let r = h - self.drift - self.rho * p;
            *o = c - half_prec * r * r;
        }
    }

    /// `sum_i w_i * grad log p(h | prevs[i])`, reduced through the
    /// weighted moments of the residual.
    pub fn weighted_grad_log_trans(&self, h: f64, prevs: &[f64], weights: &[f64]) -> Ar1Grad {
        let (mut sw, mut sr, mut srr, mut spr) = (0.0, 0.0, 0.0, 0.0);
        for (&p, &w) in prevs.iter().zip(weights) {
            let r = h - self.drift - self.rho * p;
            let wr = w * r;
            sw += w;
            sr += wr;
            srr += wr * r;
            spr += wr * p;
        }
        let s2 = self.sigma * self.sigma;
        Ar1Grad {
            rho: spr / s2,
            sigma: -sw / self.sigma + srr / (s2 * self.sigma),
            drift: sr / s2,
        }
    }

    pub fn sample_init<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let sd = self.sigma / (1.0 - self.rho * self.rho).sqrt();
        sample_normal(rng, 0.0, sd)
    }

    pub fn sample_trans<R: Rng + ?Sized>(&self, h_prev: f64, rng: &mut R) -> f64 {
        sample_normal(rng, self.rho * h_prev + self.drift, self.sigma)
    }
}
