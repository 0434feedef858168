//! Sequential importance sampling with adaptive resampling.

mod filter;
mod resample;
mod weights;

pub use filter::{log_marginal_increments, run_filter, FilterConfig, FilterResult, ParticleSystem, Proposal};
pub use resample::{resample, systematic_with_offset, ResamplingScheme};
pub use weights::{ess, log_sum_exp, normalize_log_weights};
