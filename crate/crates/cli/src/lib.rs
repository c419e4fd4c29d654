//! Command-line driver: config loading, experiment orchestration and CSV
//! output for the `rmabf` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, Cli, Command};
pub use config::{load_config, parse_config, ExperimentConfig};
pub use error::CliError;
pub use output::{format_number, Table};
