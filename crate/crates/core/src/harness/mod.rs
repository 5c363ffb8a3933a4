//! Scenario runner, parameter sweeps and CSV output behind the CLI.

pub mod builtin;
mod output;
mod run;
mod scenario;
mod sweep;

use thiserror::Error;

use crate::coupling::CouplingError;
use crate::model::ModelError;
use crate::solvers::SolverError;

pub use output::{write_report, write_sweep};
pub use run::{run, RunReport, SeriesRow, Summary};
pub use scenario::{DomainSpec, EndCondition, ModelSpec, Overrides, Scenario, Stationarity};
pub use sweep::{sweep, SweepParameter, SweepRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("step {step} at t = {t}: {source}")]
    Coupling {
        step: usize,
        t: f64,
        #[source]
        source: CouplingError,
        /// Everything committed before the failure.
        partial: Box<RunReport>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl From<CouplingError> for HarnessError {
    fn from(e: CouplingError) -> Self {
        match e {
            CouplingError::Config(m) => HarnessError::Scenario(m),
            other => HarnessError::Scenario(other.to_string()),
        }
    }
}

impl HarnessError {
    /// Whether the failure is a fixed point that did not converge.
    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            HarnessError::Coupling {
                source: CouplingError::NonConvergence { .. },
                ..
            }
        )
    }

    /// Whether the input was rejected before any step ran.
    pub fn is_validation(&self) -> bool {
        matches!(self, HarnessError::Scenario(_) | HarnessError::Model(_) | HarnessError::Solver(_))
    }
}
