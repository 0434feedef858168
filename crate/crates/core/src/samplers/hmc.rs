use super::leapfrog::{hamiltonian, leapfrog_from};
use super::{accept, standard_normal_vec, stream, ChainOutput, Draw, SamplerConfig, MAX_POTENTIAL_CHANGE};
use crate::error::{Error, Result};

/// Hamiltonian Monte Carlo on a target with exact density and gradient.
///
/// `log_post` may return `-inf` outside the support; such proposals are
/// rejected without evaluating the gradient there. Draws carry an empty
/// trajectory and the log target density in `log_z`.
pub fn hmc<P, G>(log_post: P, grad_log_post: G, cfg: &SamplerConfig, theta_init: &[f64]) -> Result<ChainOutput<f64>>
where
    P: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    cfg.validate()?;
    if theta_init.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("initial point is not finite".into()));
    }
    let mut lp = log_post(theta_init);
    if !lp.is_finite() {
        return Err(Error::Domain(format!("log target is {lp} at the initial point")));
    }
    let dim = theta_init.len();
    let mut theta = theta_init.to_vec();
    let mut grad = grad_log_post(&theta);
    let mut momentum_rng = cfg.seed.stream(&[stream::MOMENTUM]);
    let mut accept_rng = cfg.seed.stream(&[stream::ACCEPT]);
    let mut out = ChainOutput::with_capacity(cfg);

    for k in 1..=cfg.iterations {
        let r0 = standard_normal_vec(dim, &mut momentum_rng);
        let h0 = hamiltonian(-lp, &r0);
        let start = -lp;
        let guarded = |t: &[f64]| {
            let v = log_post(t);
            if !v.is_finite() {
                return Err(Error::Domain(format!("log target is {v}")));
            }
            if (-v - start).abs() > MAX_POTENTIAL_CHANGE {
                return Err(Error::Divergence { step: 0 });
            }
            Ok(grad_log_post(t))
        };
        let accepted = match leapfrog_from(guarded, &theta, &r0, &grad, cfg.leapfrog_steps, cfg.step_size) {
            Ok(path) => {
                let lp_new = log_post(&path.theta);
                let h1 = hamiltonian(-lp_new, &path.momentum);
                let ok = accept(h0.total - h1.total, &mut accept_rng);
                if ok {
                    theta = path.theta;
                    grad = path.grad;
                    lp = lp_new;
                }
                ok
            }
            Err(e) => {
                log::debug!("hmc iteration {k} rejected: {e}");
                false
            }
        };
        out.record(cfg, k, accepted, || Draw { iter: k, theta: theta.clone(), trajectory: Vec::new(), log_z: lp });
    }
    Ok(out.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSeed;

    fn std_normal_cfg(iterations: usize, eps: f64, steps: usize) -> SamplerConfig {
        let mut cfg = SamplerConfig::new(iterations, 1, RngSeed(11));
        cfg.step_size = eps;
        cfg.leapfrog_steps = steps;
        cfg
    }

    #[test]
    fn standard_normal_moments() {
        let cfg = std_normal_cfg(20_000, 0.1, 10);
        let out = hmc(|t| -0.5 * t[0] * t[0], |t| vec![-t[0]], &cfg, &[0.0]).unwrap();
        let xs = out.component(0);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.05, "mean {mean}");
        assert!((var - 1.0).abs() < 0.1, "var {var}");
    }

    #[test]
    fn tiny_steps_always_accept() {
        let cfg = std_normal_cfg(200, 1e-8, 3);
        let out = hmc(|t| -0.5 * t[0] * t[0], |t| vec![-t[0]], &cfg, &[0.7]).unwrap();
        assert_eq!(out.acceptance_rate, 1.0);
    }

    #[test]
    fn support_boundary_rejects() {
        // Half-normal on theta > 0 started next to the boundary.
        let lp = |t: &[f64]| if t[0] > 0.0 { -0.5 * t[0] * t[0] } else { f64::NEG_INFINITY };
        let cfg = std_normal_cfg(500, 0.5, 5);
        let out = hmc(lp, |t| vec![-t[0]], &cfg, &[0.01]).unwrap();
        assert!(out.draws.iter().all(|d| d.theta[0] > 0.0));
        assert!(out.acceptance_rate < 1.0);
    }

    #[test]
    fn deterministic() {
        let cfg = std_normal_cfg(300, 0.2, 4);
        let a = hmc(|t| -0.5 * t[0] * t[0], |t| vec![-t[0]], &cfg, &[0.0]).unwrap();
        let b = hmc(|t| -0.5 * t[0] * t[0], |t| vec![-t[0]], &cfg, &[0.0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_start_is_rejected() {
        let cfg = std_normal_cfg(10, 0.1, 1);
        assert!(hmc(|_| f64::NEG_INFINITY, |_| vec![0.0], &cfg, &[0.0]).is_err());
    }
}
