//! File formats, experiment drivers and the `qabc` command line on top of
//! [`qabc_core`].

pub mod cli;
pub mod error;
pub mod files;
pub mod record;
pub mod verify;

pub use error::{Error, Result};
pub use files::{load_scenario, read_scenario, save_scenario, write_scenario};
pub use record::{ConvergenceRow, RunRecord};
pub use verify::{run_verify, VerifyReport};

/// Reference scenario (8 tasks) used by the acceptance suite and as a
/// ready-made input for `verify`.
pub const REFERENCE_SCENARIO: &str = include_str!("../data/reference_scenario.json");
