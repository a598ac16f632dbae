//! Command-line front end: JSON run configurations in, CSV tables and JSON
//! reports out.

mod commands;
mod config;
pub mod report;

pub use commands::{resolve, run, study_table, CliError, RunSummary};
pub use config::{
    parse_config, BochnerConfig, BochnerFamily, Command, ConfigError, Discretization, ForcingKind, ModelConfig,
    PropertiesConfig, RunConfig, DEFAULT_SEED,
};
