//! Scenario-driven front end for the Hodgkin-Huxley simulators: strict
//! text-format parsing, model dispatch, CSV traces, and JSON metrics with
//! deterministic seeds.

// Parameter guards are written `!(x > 0.0)` so NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csvio;
pub mod error;
pub mod metrics;
pub mod runner;
pub mod scenario;
pub mod units;

pub use error::CliError;
pub use runner::{check_regime, run_scenario, RunOutput};
pub use scenario::{parse_scenario, Model, ScenarioConfig};
