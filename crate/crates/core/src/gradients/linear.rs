use super::{check_inputs, initial_table, PathGradientTable, ScoreEstimate, ScoreKind};
use crate::error::Result;
use crate::model::StateSpaceModel;
use crate::smc::ParticleSystem;

/// Path-based score estimate `S_T = sum_i W_T^i g_T^i`, where `g_t^i`
/// accumulates the per-step gradient terms along the ancestral line of
/// particle `i`.
pub fn score_linear<M: StateSpaceModel>(
    model: &M,
    theta: &[f64],
    system: &ParticleSystem<M::State>,
    y: &[M::Obs],
) -> Result<ScoreEstimate> {
    check_inputs(model, theta, system, y)?;
    let mut g = initial_table(model, theta, &system.particles[0], &y[0]);
    let mut next = PathGradientTable::zeros(system.particle_count(), model.dim());
    for t in 1..system.len() {
        let prev = &system.particles[t - 1];
        for (i, (h, &a)) in system.particles[t].iter().zip(&system.ancestors[t]).enumerate() {
            let row = next.row_mut(i);
            row.copy_from_slice(g.row(a));
            model.add_grad_log_obs(theta, &y[t], h, row);
            model.add_grad_log_trans(theta, h, &prev[a], row);
        }
        std::mem::swap(&mut g, &mut next);
    }
    let score = g.weighted_sum(&system.weights[system.len() - 1]);
    Ok(ScoreEstimate::new(model, theta, score, ScoreKind::Linear))
}
