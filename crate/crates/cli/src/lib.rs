//! Command-line front end for the crn-core toolkit: scenario loading,
//! per-command runners and CSV/JSON result tables.

pub mod config;
pub mod error;
pub mod manifest;
pub mod runners;
pub mod table;

pub use config::ScenarioConfig;
pub use error::{CliError, Result};
pub use manifest::{resolve_seeds, Command, Format, RunManifest, SolverOverrides};
pub use runners::{
    execute, run_compare, run_select_relay, run_share, run_share_sweep, run_simulate, write_output,
};
pub use table::{Cell, ResultTable};
