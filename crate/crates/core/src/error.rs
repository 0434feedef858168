use thiserror::Error;

/// Errors raised by the inference engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Parameters fall outside the prior support of the model.
    #[error("parameter outside the model support: {0}")]
    Domain(String),

    /// Every particle weight is zero at time `t` (1-based).
    #[error("particle filter degenerated: all weights are zero at t = {t}")]
    DegenerateFilter { t: usize },

    /// No previous particle can reach particle `particle` at time `t` (1-based).
    #[error("backward kernel has no mass for particle {particle} at t = {t}")]
    DegenerateBackwardKernel { t: usize, particle: usize },

    /// The gradient became non-finite during leapfrog step `step` (1-based).
    #[error("leapfrog diverged at step {step}")]
    Divergence { step: usize },

    #[error("autocorrelation is undefined for a constant series")]
    UndefinedAcf,

    #[error("malformed dataset: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
