//! Experiment runner behind the `nbmimo` binary.

pub mod config;
pub mod error;
pub mod run;

pub use config::{parse_config, parse_raw, Experiment, RawConfig, SimConfig};
pub use error::CliError;
pub use run::{execute, Outcome};
