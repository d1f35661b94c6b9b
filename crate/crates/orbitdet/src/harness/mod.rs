//! Scenario configuration, Monte-Carlo experiment running, RMSE scoring, and
//! report output.

mod ephemeris;
mod report;
mod runner;
mod scenario;

pub use ephemeris::{
    parse_ephemeris, read_ephemeris, score_predictions, score_records, write_ephemeris,
    EphemerisRecord, ScoreError,
};
pub use report::{
    rmse, rmse_paired, RunOutcome, RunReport, SweepReport, SweepRow, TOP25_DEFINITION,
};
pub use runner::{iod_then_filter, run_scenario, sweep_dropout, WORKERS_ENV_VAR};
pub use scenario::{
    load_scenario, parse_scenario, InitialOrbit, IodSetup, Scenario, ScenarioError,
};

use thiserror::Error;

use crate::dynamics::DynamicsError;
use crate::elements::ElementsError;
use crate::measurements::MeasurementError;
use crate::state::StateError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error("empty input: at least one sample is required")]
    EmptyInput,
    #[error("paired inputs differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("all {attempted} runs failed; first error: {first_error}")]
    AllRunsFailed {
        attempted: usize,
        first_error: String,
    },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Elements(#[from] ElementsError),
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
