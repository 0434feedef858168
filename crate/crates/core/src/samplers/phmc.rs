use super::leapfrog::{hamiltonian, leapfrog_from};
use super::{accept, standard_normal_vec, stream, ChainOutput, Draw, SamplerConfig, MAX_POTENTIAL_CHANGE};
use crate::error::{Error, Result};
use crate::gradients::ScoreKind;
use crate::model::StateSpaceModel;
use crate::smc::run_filter;

/// Filter output needed at one point of a trajectory.
struct Estimate<S> {
    log_z: f64,
    log_prior: f64,
    grad: Vec<f64>,
    trajectory: Vec<S>,
}

impl<S> Estimate<S> {
    fn potential(&self) -> f64 {
        -self.log_z - self.log_prior
    }
}

fn estimate<M: StateSpaceModel>(
    model: &M,
    y: &[M::Obs],
    cfg: &SamplerConfig,
    theta: &[f64],
    kind: ScoreKind,
    keys: &[u64],
) -> Result<Estimate<M::State>> {
    if !model.in_support(theta) {
        return Err(Error::Domain(format!("leapfrog left the support at {theta:?}")));
    }
    let mut rng = cfg.seed.stream(keys);
    let fit = run_filter(model, theta, y, &cfg.filter, &mut rng, Some(kind))?;
    let score = fit.score.expect("score requested");
    Ok(Estimate { log_z: fit.log_z, log_prior: model.log_prior(theta), grad: score.posterior_grad, trajectory: fit.trajectory })
}

/// Particle Hamiltonian Monte Carlo.
///
/// Every iteration draws `r0 ~ N(0, I)`, estimates the log-likelihood and
/// the log-posterior gradient at the current point with a fresh filter
/// run, then follows `L` leapfrog steps, each driven by a new filter run
/// with its own random stream. The endpoint `(theta_L, -r_L)` and the
/// latent path sampled by the last run are accepted with probability
/// `min(1, exp(H(theta_0, r_0) - H(theta_L, r_L)))`, where the potential
/// is `-log p_hat(y | theta) - log p(theta)`. An iteration therefore costs
/// `L + 1` filter runs.
///
/// With `reuse_current_loglik` the estimate and gradient from the run
/// that produced the current state are carried over instead, saving one
/// filter run per iteration.
///
/// Leaving the prior support, a degenerate filter, a non-finite gradient,
/// or a potential change above [`MAX_POTENTIAL_CHANGE`] ends the
/// trajectory early and rejects the iteration.
pub fn phmc<M: StateSpaceModel>(
    model: &M,
    y: &[M::Obs],
    cfg: &SamplerConfig,
    theta_init: &[f64],
    kind: ScoreKind,
) -> Result<ChainOutput<M::State>> {
    cfg.validate()?;
    crate::model::check_dim(theta_init, model.dim())?;
    if !model.in_support(theta_init) {
        return Err(Error::Domain(format!("initial point {theta_init:?}")));
    }
    let dim = model.dim();
    let mut current = estimate(model, y, cfg, theta_init, kind, &[stream::FILTER, 0, 0])?;
    let mut theta = theta_init.to_vec();
    let mut momentum_rng = cfg.seed.stream(&[stream::MOMENTUM]);
    let mut accept_rng = cfg.seed.stream(&[stream::ACCEPT]);
    let mut out = ChainOutput::with_capacity(cfg);

    for k in 1..=cfg.iterations {
        let r0 = standard_normal_vec(dim, &mut momentum_rng);
        let kk = k as u64;
        let accepted = match iterate(model, y, cfg, &theta, &current, &r0, kind, kk) {
            Ok((end_theta, end, log_ratio)) => {
                let ok = accept(log_ratio, &mut accept_rng);
                if ok {
                    theta = end_theta;
                    current = end;
                }
                ok
            }
            Err(e) => {
                log::debug!("phmc iteration {k} rejected: {e}");
                false
            }
        };
        out.record(cfg, k, accepted, || Draw {
            iter: k,
            theta: theta.clone(),
            trajectory: current.trajectory.clone(),
            log_z: current.log_z,
        });
    }
    Ok(out.finish())
}

/// Stream path of the filter run at leapfrog step `step` of iteration `k`.
///
/// The endpoint run has a key independent of `L`, so chains that differ
/// only in `eps` or `L` share the random numbers behind both estimates in
/// their acceptance ratios.
fn filter_keys(k: u64, step: usize, steps: usize) -> [u64; 3] {
    let id = if step == steps { END_RUN } else { step as u64 };
    [stream::FILTER, k, id]
}

const END_RUN: u64 = u64::MAX;

/// Builds one proposal; returns its endpoint, the endpoint estimate, and
/// the log acceptance ratio.
#[allow(clippy::too_many_arguments)]
fn iterate<M: StateSpaceModel>(
    model: &M,
    y: &[M::Obs],
    cfg: &SamplerConfig,
    theta0: &[f64],
    current: &Estimate<M::State>,
    r0: &[f64],
    kind: ScoreKind,
    k: u64,
) -> Result<(Vec<f64>, Estimate<M::State>, f64)> {
    let fresh;
    let start = if cfg.reuse_current_loglik {
        current
    } else {
        fresh = estimate(model, y, cfg, theta0, kind, &[stream::FILTER, k, 0])?;
        &fresh
    };
    let u0 = start.potential();
    let h0 = hamiltonian(u0, r0);

    let mut step = 0usize;
    let mut last: Option<Estimate<M::State>> = None;
    let grad = |theta: &[f64]| {
        step += 1;
        let est = estimate(model, y, cfg, theta, kind, &filter_keys(k, step, cfg.leapfrog_steps))?;
        if (est.potential() - u0).abs() > MAX_POTENTIAL_CHANGE {
            return Err(Error::Divergence { step });
        }
        let g = est.grad.clone();
        last = Some(est);
        Ok(g)
    };
    let path = leapfrog_from(grad, theta0, r0, &start.grad, cfg.leapfrog_steps, cfg.step_size)?;
    let end = last.expect("at least one leapfrog step");
    let h1 = hamiltonian(end.potential(), &path.momentum);
    Ok((path.theta, end, h0.total - h1.total))
}
