use super::{check_inputs, initial_table, PathGradientTable, ScoreEstimate, ScoreKind};
use crate::error::{Error, Result};
use crate::model::StateSpaceModel;
use crate::smc::ParticleSystem;

/// One step of the backward-marginalized gradient recursion.
///
/// For each new particle `j` the previous particles are reweighted by the
/// backward kernel, `v_ij ∝ prev_weights[i] * p(H_t^j | H_{t-1}^i)`, and
///
/// ```text
/// g_t^j = sum_i v_ij (g_{t-1}^i + grad log p(H_t^j | H_{t-1}^i)) + grad log p(y_t | H_t^j).
/// ```
///
/// Costs O(N^2) transition evaluations. A degenerate kernel is reported
/// with `t = 0`; [`score_quadratic`] fills in the actual time index.
pub fn score_quadratic_step<M: StateSpaceModel>(
    model: &M,
    theta: &[f64],
    prev_particles: &[M::State],
    prev_weights: &[f64],
    prev_g: &PathGradientTable,
    new_particles: &[M::State],
    y_t: &M::Obs,
) -> Result<PathGradientTable> {
    let n_prev = prev_particles.len();
    let dim = model.dim();
    if prev_weights.len() != n_prev || prev_g.particles() != n_prev || prev_g.dim() != dim {
        return Err(Error::InvalidArgument(format!(
            "previous tables disagree: {n_prev} particles, {} weights, {}x{} gradients",
            prev_weights.len(),
            prev_g.particles(),
            prev_g.dim()
        )));
    }
    let log_prev_w: Vec<f64> = prev_weights.iter().map(|w| w.ln()).collect();
    let mut log_v = vec![0.0; n_prev];
    let mut v = vec![0.0; n_prev];
    let mut out = PathGradientTable::zeros(new_particles.len(), dim);
    // Component-major copy of prev_g so each component is one dot product.
    let mut columns = vec![0.0; n_prev * dim];
    for i in 0..n_prev {
        for (k, g) in prev_g.row(i).iter().enumerate() {
            columns[k * n_prev + i] = *g;
        }
    }

    for (j, h) in new_particles.iter().enumerate() {
        model.log_trans_many(theta, h, prev_particles, &mut log_v);
        let mut max = f64::NEG_INFINITY;
        for (lv, lw) in log_v.iter_mut().zip(&log_prev_w) {
            *lv += lw;
            if *lv > max {
                max = *lv;
            }
        }
        if !max.is_finite() {
            return Err(Error::DegenerateBackwardKernel { t: 0, particle: j + 1 });
        }
        let mut total = 0.0;
        for (vi, lv) in v.iter_mut().zip(&log_v) {
            *vi = (lv - max).exp();
            total += *vi;
        }

        // Accumulate with unnormalized v, then rescale once.
        let row = out.row_mut(j);
        for (o, col) in row.iter_mut().zip(columns.chunks_exact(n_prev)) {
            *o = dot(&v, col);
        }
        model.add_weighted_grad_log_trans(theta, h, prev_particles, &v, row);
        let inv = 1.0 / total;
        row.iter_mut().for_each(|o| *o *= inv);
        model.add_grad_log_obs(theta, y_t, h, row);
    }
    Ok(out)
}

/// Dot product with four independent accumulators.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Backward-marginalized score estimate `S'_T = sum_j W_T^j g_T^j`.
///
/// The backward kernel at each step uses the filter's normalized weights
/// `W_{t-1}` over the particles `H_{t-1}`, i.e. the particle approximation
/// of `p(h_{t-1} | y_{1:t-1})` before any resampling.
pub fn score_quadratic<M: StateSpaceModel>(
    model: &M,
    theta: &[f64],
    system: &ParticleSystem<M::State>,
    y: &[M::Obs],
) -> Result<ScoreEstimate> {
    check_inputs(model, theta, system, y)?;
    let mut g = initial_table(model, theta, &system.particles[0], &y[0]);
    for t in 1..system.len() {
        g = score_quadratic_step(
            model,
            theta,
            &system.particles[t - 1],
            &system.weights[t - 1],
            &g,
            &system.particles[t],
            &y[t],
        )
        .map_err(|e| match e {
            Error::DegenerateBackwardKernel { particle, .. } => {
                Error::DegenerateBackwardKernel { t: t + 1, particle }
            }
            other => other,
        })?;
    }
    let score = g.weighted_sum(&system.weights[system.len() - 1]);
    Ok(ScoreEstimate::new(model, theta, score, ScoreKind::Quadratic))
}
