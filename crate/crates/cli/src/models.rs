//! Bridges between the file formats and the concrete model types.

use phmc_core::io::ObservationKind;
use phmc_core::model::{LinearGaussianModel, ObservationSeries, PoissonCountModel, StateSpaceModel};

use crate::config::ModelChoice;
use crate::error::{CliError, CliResult};

/// A model whose observations can be read from and written to datasets.
pub trait CliModel: StateSpaceModel<State = f64> {
    const KIND: ObservationKind;

    fn observations(series: &ObservationSeries) -> phmc_core::Result<&[Self::Obs]>;
    fn series(y: Vec<Self::Obs>) -> ObservationSeries;
}

impl CliModel for PoissonCountModel {
    const KIND: ObservationKind = ObservationKind::Count;

    fn observations(series: &ObservationSeries) -> phmc_core::Result<&[u64]> {
        series.as_counts()
    }

    fn series(y: Vec<u64>) -> ObservationSeries {
        ObservationSeries::Count(y)
    }
}

impl CliModel for LinearGaussianModel {
    const KIND: ObservationKind = ObservationKind::Real;

    fn observations(series: &ObservationSeries) -> phmc_core::Result<&[f64]> {
        series.as_real()
    }

    fn series(y: Vec<f64>) -> ObservationSeries {
        ObservationSeries::Real(y)
    }
}

pub fn lgssm(d: usize) -> CliResult<LinearGaussianModel> {
    LinearGaussianModel::new(d).map_err(|e| CliError::config(e.to_string()))
}

/// Runs `$body` with `$m` bound to the configured model.
macro_rules! with_model {
    ($choice:expr, $m:ident => $body:expr) => {
        match $choice {
            $crate::config::ModelChoice::Poisson => {
                let $m = phmc_core::model::PoissonCountModel::new();
                $body
            }
            $crate::config::ModelChoice::Lgssm { d } => {
                let $m = $crate::models::lgssm(d)?;
                $body
            }
        }
    };
}
pub(crate) use with_model;

pub fn model_name(choice: ModelChoice) -> String {
    match choice {
        ModelChoice::Poisson => "poisson".into(),
        ModelChoice::Lgssm { d } => format!("lgssm(d={d})"),
    }
}
