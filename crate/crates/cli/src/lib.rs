//! Configuration handling and report generation for the `obh` tool.

pub mod commands;
pub mod config;

pub use commands::{CommandError, CommandResult};
pub use config::{ConfigError, RunConfig, Scenario};
