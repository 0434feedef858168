//! Exact oracles and chain diagnostics.

mod kalman;
mod summary;

pub use kalman::kalman_log_likelihood;
pub use summary::{acf, quantile, summarize_chain, summarize_latents, ChainSummary, LatentSummary, ParamSummary};

/// Default step for [`finite_difference_score`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Central differences `(f(x + d e_i) - f(x - d e_i)) / 2d` per component.
pub fn finite_difference_score<F: FnMut(&[f64]) -> f64>(mut f: F, theta: &[f64], delta: f64) -> Vec<f64> {
    let mut x = theta.to_vec();
    (0..theta.len())
        .map(|i| {
            x[i] = theta[i] + delta;
            let up = f(&x);
            x[i] = theta[i] - delta;
            let dn = f(&x);
            x[i] = theta[i];
            (up - dn) / (2.0 * delta)
        })
        .collect()
}
