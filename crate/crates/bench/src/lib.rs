//! Fixtures shared by the benchmarks.

use phmc_core::model::{simulate_dataset, PoissonCountModel};
use phmc_core::rng::RngSeed;

/// Parameters of the count-model benchmarks.
pub const COUNT_THETA: [f64; 3] = [0.8, 0.5, 0.2];

/// A simulated count series of length `len`.
pub fn count_series(len: usize) -> (PoissonCountModel, Vec<u64>) {
    let m = PoissonCountModel::new();
    let (_, y) = simulate_dataset(&m, &COUNT_THETA, len, RngSeed(1)).expect("valid parameters");
    (m, y)
}
