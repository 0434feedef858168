use rand::Rng;

use super::{accept, standard_normal_vec, stream, ChainOutput, Draw, SamplerConfig};
use crate::error::{Error, Result};
use crate::model::StateSpaceModel;
use crate::smc::{run_filter, FilterConfig};

/// Current state of a pseudo-marginal chain.
#[derive(Debug, Clone, PartialEq)]
pub struct PmmhState<S> {
    pub theta: Vec<f64>,
    pub log_z: f64,
    pub log_prior: f64,
    pub trajectory: Vec<S>,
}

impl<S: Copy> PmmhState<S> {
    /// Runs one filter at `theta` to obtain the starting estimate.
    pub fn initial<M, R>(model: &M, y: &[M::Obs], filter: &FilterConfig, theta: &[f64], rng: &mut R) -> Result<Self>
    where
        M: StateSpaceModel<State = S>,
        R: Rng + ?Sized,
    {
        let log_prior = model.log_prior(theta);
        if !model.in_support(theta) || !log_prior.is_finite() {
            return Err(Error::Domain(format!("initial point {theta:?}")));
        }
        let fit = run_filter(model, theta, y, filter, rng, None)?;
        Ok(Self { theta: theta.to_vec(), log_z: fit.log_z, log_prior, trajectory: fit.trajectory })
    }
}

/// One Metropolis-Hastings update towards `proposal`.
///
/// Out-of-support proposals are rejected without running the filter, and
/// a degenerate filter also counts as a rejection. The current estimate
/// is reused, never recomputed.
pub fn pmmh_step<M, R1, R2>(
    model: &M,
    y: &[M::Obs],
    filter: &FilterConfig,
    current: &mut PmmhState<M::State>,
    proposal: Vec<f64>,
    filter_rng: &mut R1,
    accept_rng: &mut R2,
) -> bool
where
    M: StateSpaceModel,
    R1: Rng + ?Sized,
    R2: Rng + ?Sized,
{
    if !model.in_support(&proposal) {
        return false;
    }
    let log_prior = model.log_prior(&proposal);
    let fit = match run_filter(model, &proposal, y, filter, filter_rng, None) {
        Ok(f) => f,
        Err(e) => {
            log::debug!("pmmh proposal rejected: {e}");
            return false;
        }
    };
    let log_ratio = fit.log_z + log_prior - current.log_z - current.log_prior;
    if accept(log_ratio, accept_rng) {
        *current = PmmhState { theta: proposal, log_z: fit.log_z, log_prior, trajectory: fit.trajectory };
        true
    } else {
        false
    }
}

/// Particle marginal Metropolis-Hastings with the proposal
/// `theta' = theta + rw_scale z`, `z ~ N(0, I)`.
pub fn pmmh<M: StateSpaceModel>(
    model: &M,
    y: &[M::Obs],
    cfg: &SamplerConfig,
    theta_init: &[f64],
) -> Result<ChainOutput<M::State>> {
    cfg.validate()?;
    crate::model::check_dim(theta_init, model.dim())?;
    let mut current = PmmhState::initial(model, y, &cfg.filter, theta_init, &mut cfg.seed.stream(&[stream::FILTER, 0]))?;
    let mut proposal_rng = cfg.seed.stream(&[stream::PROPOSAL]);
    let mut accept_rng = cfg.seed.stream(&[stream::ACCEPT]);
    let mut out = ChainOutput::with_capacity(cfg);

    for k in 1..=cfg.iterations {
        let z = standard_normal_vec(model.dim(), &mut proposal_rng);
        let proposal: Vec<f64> = current.theta.iter().zip(&z).map(|(t, z)| t + cfg.rw_scale * z).collect();
        let mut filter_rng = cfg.seed.stream(&[stream::FILTER, k as u64]);
        let accepted = pmmh_step(model, y, &cfg.filter, &mut current, proposal, &mut filter_rng, &mut accept_rng);
        out.record(cfg, k, accepted, || Draw {
            iter: k,
            theta: current.theta.clone(),
            trajectory: current.trajectory.clone(),
            log_z: current.log_z,
        });
    }
    Ok(out.finish())
}
