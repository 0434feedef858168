//! Particle MCMC for state-space models.
//!
//! The crate provides a bootstrap particle filter with adaptive resampling,
//! two particle estimators of the score (a path-based O(N) estimator and an
//! O(N^2) estimator that marginalizes over the backward kernel), and three
//! samplers built on them: reference HMC for tractable targets, particle
//! marginal Metropolis-Hastings, and particle Hamiltonian Monte Carlo, which
//! drives leapfrog trajectories with particle score estimates.
//!
//! ```
//! use phmc_core::model::{PoissonCountModel, StateSpaceModel, simulate_dataset};
//! use phmc_core::smc::{run_filter, FilterConfig};
//! use phmc_core::gradients::ScoreKind;
//! use phmc_core::rng::RngSeed;
//!
//! let model = PoissonCountModel::new();
//! let truth = [0.8, 0.5, 0.2];
//! let (_, y) = simulate_dataset(&model, &truth, 50, RngSeed(1)).unwrap();
//! let mut rng = RngSeed(2).rng();
//! let cfg = FilterConfig::new(200);
//! let fit = run_filter(&model, &truth, &y, &cfg, &mut rng, Some(ScoreKind::Quadratic)).unwrap();
//! assert!(fit.log_z.is_finite());
//! assert_eq!(fit.score.unwrap().score.len(), model.dim());
//! ```

pub mod diagnostics;
pub mod error;
pub mod gradients;
pub mod io;
pub mod model;
pub mod rng;
pub mod samplers;
pub mod smc;

pub use error::{Error, Result};
pub use model::{LinearGaussianModel, ObservationSeries, ParamVector, PoissonCountModel, StateSpaceModel};
pub use rng::RngSeed;
