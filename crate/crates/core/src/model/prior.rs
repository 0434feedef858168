//! Scalar prior densities shared by the concrete models.

use std::f64::consts::LN_2;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use statrs::function::gamma::ln_gamma;

pub(crate) const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `rho ~ Uniform[-1, 1]`, restricted to the open interval where the
/// stationary initial density exists.
pub(crate) fn log_uniform_pm1(rho: f64) -> f64 {
    if rho.abs() < 1.0 {
        -LN_2
    } else {
        f64::NEG_INFINITY
    }
}

pub(crate) fn log_normal(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    -sd.ln() - HALF_LN_2PI - 0.5 * z * z
}

pub(crate) fn grad_log_normal(x: f64, mean: f64, sd: f64) -> f64 {
    -(x - mean) / (sd * sd)
}

/// Prior on a scale `sigma` induced by `1/sigma^2 ~ Gamma(shape, rate)`.
///
/// The density on sigma carries the Jacobian `|d(sigma^-2)/d sigma| = 2 sigma^-3`:
/// `log p(sigma) = a ln b - lnGamma(a) + ln 2 - (2a + 1) ln sigma - b / sigma^2`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GammaPrecision {
    pub shape: f64,
    pub rate: f64,
}

impl GammaPrecision {
    pub fn log_density(&self, sigma: f64) -> f64 {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return f64::NEG_INFINITY;
        }
        let (a, b) = (self.shape, self.rate);
        a * b.ln() - ln_gamma(a) + LN_2 - (2.0 * a + 1.0) * sigma.ln() - b / (sigma * sigma)
    }

    pub fn grad_log_density(&self, sigma: f64) -> f64 {
        let (a, b) = (self.shape, self.rate);
        -(2.0 * a + 1.0) / sigma + 2.0 * b / (sigma * sigma * sigma)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let precision: f64 = Gamma::new(self.shape, 1.0 / self.rate)
            .expect("valid gamma prior")
            .sample(rng);
        // Shape 0.01 puts most mass on precisions that underflow to zero.
        let precision = precision.max(f64::MIN_POSITIVE);
        precision.sqrt().recip().min(f64::MAX.sqrt())
    }
}

pub(crate) fn sample_normal<R: Rng + ?Sized>(rng: &mut R, mean: f64, sd: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    mean + sd * z
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_ln_2pi_constant() {
        assert!((HALF_LN_2PI - 0.5 * (2.0 * PI).ln()).abs() < 1e-15);
    }

    #[test]
    fn gamma_precision_integrates_to_one() {
        // Shape 2, rate 1 keeps the density smooth enough for a trapezoid rule.
        let p = GammaPrecision { shape: 2.0, rate: 1.0 };
        let (lo, hi, n) = (1e-3, 60.0, 400_000);
        let dx = (hi - lo) / n as f64;
        let total: f64 = (0..=n)
            .map(|k| {
                let x = lo + k as f64 * dx;
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                w * p.log_density(x).exp()
            })
            .sum::<f64>()
            * dx;
        assert!((total - 1.0).abs() < 1e-4, "{total}");
    }

    #[test]
    fn gamma_precision_gradient_matches_fd() {
        let p = GammaPrecision { shape: 0.01, rate: 0.01 };
        for &s in &[0.05, 0.2, 0.8, 3.0] {
            let d = 1e-6;
            let fd = (p.log_density(s + d) - p.log_density(s - d)) / (2.0 * d);
            let g = p.grad_log_density(s);
            assert!((fd - g).abs() <= 1e-6_f64.max(1e-5 * g.abs()), "{s}: {fd} vs {g}");
        }
    }

    #[test]
    fn outside_support_is_neg_inf() {
        assert_eq!(log_uniform_pm1(1.0), f64::NEG_INFINITY);
        assert_eq!(log_uniform_pm1(-1.5), f64::NEG_INFINITY);
        let p = GammaPrecision { shape: 0.01, rate: 0.01 };
        assert_eq!(p.log_density(0.0), f64::NEG_INFINITY);
        assert_eq!(p.log_density(-1.0), f64::NEG_INFINITY);
    }
}
