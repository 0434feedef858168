//! Particle estimates of the score `grad log p_theta(y_{1:T})`.
//!
//! Both estimators rest on Fisher's identity: the score equals the
//! smoothing expectation of `grad log p_theta(y_{1:T}, h_{1:T})`, which
//! splits into per-step terms
//!
//! ```text
//! grad log p(h_1) + sum_{t>=2} grad log p(h_t | h_{t-1}) + sum_t grad log p(y_t | h_t).
//! ```
//!
//! * [`score_linear`] sums these terms along each particle's ancestral
//!   path and averages over the final weights, in O(N T). Repeated
//!   resampling collapses the early parts of all paths onto a few
//!   ancestors, so its variance grows quickly with T.
//! * [`score_quadratic`] replaces the single ancestral link with the
//!   backward kernel `p(h_{t-1} | h_t, y_{1:t-1})`, marginalizing over all
//!   N previous particles at each step, in O(N^2 T).
//!
//! Either result is paired with the log-posterior gradient
//! `score + grad log p(theta)`.

mod linear;
mod quadratic;

pub use linear::score_linear;
pub use quadratic::{score_quadratic, score_quadratic_step};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::StateSpaceModel;
use crate::smc::ParticleSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    /// Path-based O(N) estimator.
    Linear,
    /// Backward-marginalized O(N^2) estimator.
    Quadratic,
}

impl std::str::FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Self::Linear),
            "quadratic" => Ok(Self::Quadratic),
            other => Err(Error::InvalidArgument(format!("unknown score estimator {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreEstimate {
    pub score: Vec<f64>,
    /// `score + grad log p(theta)`.
    pub posterior_grad: Vec<f64>,
    pub kind: ScoreKind,
}

impl ScoreEstimate {
    fn new<M: StateSpaceModel>(model: &M, theta: &[f64], score: Vec<f64>, kind: ScoreKind) -> Self {
        let mut prior = vec![0.0; score.len()];
        model.add_grad_log_prior(theta, &mut prior);
        let posterior_grad = score.iter().zip(&prior).map(|(s, p)| s + p).collect();
        Self { score, posterior_grad, kind }
    }
}

/// Per-particle running gradients, `N` rows of `dim` values.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGradientTable {
    dim: usize,
    values: Vec<f64>,
}

impl PathGradientTable {
    pub fn zeros(particles: usize, dim: usize) -> Self {
        Self { dim, values: vec![0.0; particles * dim] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("ragged gradient rows".into()));
        }
        Ok(Self { dim, values: rows.concat() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn particles(&self) -> usize {
        self.values.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// `sum_i weights[i] * row(i)`.
    pub fn weighted_sum(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, g) in out.iter_mut().zip(self.row(i)) {
                *o += w * g;
            }
        }
        out
    }
}

/// Base case shared by both estimators:
/// `g_1^i = grad log p(y_1 | H_1^i) + grad log p(H_1^i)`.
fn initial_table<M: StateSpaceModel>(
    model: &M,
    theta: &[f64],
    particles: &[M::State],
    y1: &M::Obs,
) -> PathGradientTable {
    let mut table = PathGradientTable::zeros(particles.len(), model.dim());
    for (i, h) in particles.iter().enumerate() {
        let row = table.row_mut(i);
        model.add_grad_log_obs(theta, y1, h, row);
        model.add_grad_log_init(theta, h, row);
    }
    table
}

fn check_inputs<M: StateSpaceModel>(
    model: &M,
    theta: &[f64],
    system: &ParticleSystem<M::State>,
    y: &[M::Obs],
) -> Result<()> {
    crate::model::check_dim(theta, model.dim())?;
    if system.len() != y.len() || system.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "particle system covers {} steps but there are {} observations",
            system.len(),
            y.len()
        )));
    }
    Ok(())
}
