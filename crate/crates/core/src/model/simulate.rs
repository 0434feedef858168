use crate::error::{Error, Result};
use crate::rng::RngSeed;

use super::StateSpaceModel;

/// Draws `(h_{1:T}, y_{1:T})` by ancestral sampling at `theta`.
///
/// Deterministic in `seed`.
pub fn simulate_dataset<M: StateSpaceModel>(
    model: &M,
    theta: &[f64],
    len: usize,
    seed: RngSeed,
) -> Result<(Vec<M::State>, Vec<M::Obs>)> {
    super::check_dim(theta, model.dim())?;
    if !model.in_support(theta) {
        return Err(Error::Domain(format!("cannot simulate at {theta:?}")));
    }
    if len == 0 {
        return Err(Error::InvalidArgument("series length must be at least 1".into()));
    }
    let mut rng = seed.rng();
    let mut states = Vec::with_capacity(len);
    let mut obs = Vec::with_capacity(len);
    let mut h = model.sample_init(theta, &mut rng);
    for t in 0..len {
        if t > 0 {
            h = model.sample_trans(theta, &h, &mut rng);
        }
        obs.push(model.sample_obs(theta, &h, &mut rng));
        states.push(h);
    }
    Ok((states, obs))
}
