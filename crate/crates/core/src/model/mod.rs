//! State-space model abstraction and the two concrete models.
//!
//! A model is a latent Markov chain `H_1 -> H_2 -> ... -> H_T` observed
//! through conditionally independent `Y_t | H_t`. Implementations supply
//! the three log-densities, matching samplers, their parameter gradients,
//! and a prior over the parameter vector.
//!
//! Gradient methods *accumulate* into the output slice (`out += grad`)
//! so that estimators can build path sums without temporaries.

mod ar1;
mod lgssm;
mod poisson;
pub(crate) mod prior;
mod simulate;

pub use lgssm::LinearGaussianModel;
pub use poisson::PoissonCountModel;
pub use simulate::simulate_dataset;

use std::fmt::Debug;

use rand::Rng;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// A state-space model with a parameter prior.
///
/// All methods are pure functions of their arguments (and the RNG passed
/// in), so one model value can be shared by many concurrent filters.
pub trait StateSpaceModel: Send + Sync {
    type State: Copy + Send + Sync + Debug;
    type Obs: Copy + Send + Sync + Debug;

    /// Short identifier, e.g. `"poisson"`.
    fn name(&self) -> &str;

    /// Ordered parameter component labels; `dim()` is their count.
    fn param_names(&self) -> &[String];

    fn dim(&self) -> usize {
        self.param_names().len()
    }

    fn in_support(&self, theta: &[f64]) -> bool;

    /// Log prior density; `-inf` exactly when `in_support` is false.
    fn log_prior(&self, theta: &[f64]) -> f64;
    fn add_grad_log_prior(&self, theta: &[f64], out: &mut [f64]);
    fn sample_prior<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64>;

    fn log_init(&self, theta: &[f64], h: &Self::State) -> f64;
    fn log_trans(&self, theta: &[f64], h: &Self::State, h_prev: &Self::State) -> f64;
    fn log_obs(&self, theta: &[f64], y: &Self::Obs, h: &Self::State) -> f64;

    fn sample_init<R: Rng + ?Sized>(&self, theta: &[f64], rng: &mut R) -> Self::State;
    fn sample_trans<R: Rng + ?Sized>(
        &self,
        theta: &[f64],
        h_prev: &Self::State,
        rng: &mut R,
    ) -> Self::State;
    fn sample_obs<R: Rng + ?Sized>(&self, theta: &[f64], h: &Self::State, rng: &mut R)
        -> Self::Obs;

    fn add_grad_log_init(&self, theta: &[f64], h: &Self::State, out: &mut [f64]);
    fn add_grad_log_trans(
        &self,
        theta: &[f64],
        h: &Self::State,
        h_prev: &Self::State,
        out: &mut [f64],
    );
    fn add_grad_log_obs(&self, theta: &[f64], y: &Self::Obs, h: &Self::State, out: &mut [f64]);

    /// `out[i] = log p(h | prevs[i])` for every `i`.
    ///
    /// Hot loop of the quadratic score estimator; override when the
    /// density has per-parameter constants worth hoisting.
    fn log_trans_many(
        &self,
        theta: &[f64],
        h: &Self::State,
        prevs: &[Self::State],
        out: &mut [f64],
    ) {
        for (o, p) in out.iter_mut().zip(prevs) {
            *o = self.log_trans(theta, h, p);
        }
    }

    /// `out += sum_i weights[i] * grad log p(h | prevs[i])`.
    fn add_weighted_grad_log_trans(
        &self,
        theta: &[f64],
        h: &Self::State,
        prevs: &[Self::State],
        weights: &[f64],
        out: &mut [f64],
    ) {
        let mut scratch = vec![0.0; out.len()];
        for (p, &w) in prevs.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            scratch.iter_mut().for_each(|s| *s = 0.0);
            self.add_grad_log_trans(theta, h, p, &mut scratch);
            for (o, s) in out.iter_mut().zip(&scratch) {
                *o += w * s;
            }
        }
    }
}

/// Calls an accumulating gradient method on a fresh zero vector.
pub fn gradient_of(dim: usize, f: impl FnOnce(&mut [f64])) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    f(&mut out);
    out
}

/// Named parameter values in the model's component order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    names: Vec<String>,
    values: Vec<f64>,
}

impl ParamVector {
    pub fn new(names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if names.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} parameter names but {} values",
                names.len(),
                values.len()
            )));
        }
        if let Some((n, v)) = names.iter().zip(&values).find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("parameter {n} is not finite ({v})")));
        }
        Ok(Self { names, values })
    }

    pub fn for_model<M: StateSpaceModel>(model: &M, values: Vec<f64>) -> Result<Self> {
        Self::new(model.param_names().to_vec(), values)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    /// Builds a vector from a JSON object mapping component names to reals.
    ///
    /// Every name in `names` must be present; unknown keys are rejected.
    pub fn from_json(names: &[String], value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidArgument("parameters must be a JSON object".into()))?;
        let mut problems = Vec::new();
        for key in obj.keys() {
            if !names.contains(key) {
                problems.push(format!("unknown parameter {key:?}"));
            }
        }
        let mut values = Vec::with_capacity(names.len());
        for name in names {
            match obj.get(name).and_then(Value::as_f64) {
                Some(v) => values.push(v),
                None => problems.push(format!("missing or non-numeric parameter {name:?}")),
            }
        }
        if !problems.is_empty() {
            return Err(Error::InvalidArgument(problems.join("; ")));
        }
        Self::new(names.to_vec(), values)
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (n, v) in self.names.iter().zip(&self.values) {
            map.insert(n.clone(), Value::from(*v));
        }
        Value::Object(map)
    }
}

/// A series of observations of a single kind.
#[derive(Debug, Clone, PartialEq)]
pub enum ObservationSeries {
    Real(Vec<f64>),
    Count(Vec<u64>),
}

impl ObservationSeries {
    pub fn len(&self) -> usize {
        match self {
            ObservationSeries::Real(v) => v.len(),
            ObservationSeries::Count(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_real(&self) -> Result<&[f64]> {
        match self {
            ObservationSeries::Real(v) => Ok(v),
            ObservationSeries::Count(_) => {
                Err(Error::Data("expected real-valued observations, found counts".into()))
            }
        }
    }

    /// Count observations. Integer-valued reals are not converted.
    pub fn as_counts(&self) -> Result<&[u64]> {
        match self {
            ObservationSeries::Count(v) => Ok(v),
            ObservationSeries::Real(_) => {
                Err(Error::Data("expected count observations, found reals".into()))
            }
        }
    }
}

pub(crate) fn check_dim(theta: &[f64], dim: usize) -> Result<()> {
    if theta.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "parameter vector has length {}, model expects {dim}",
            theta.len()
        )));
    }
    Ok(())
}
