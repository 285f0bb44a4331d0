//! Command-line driver for the emgest pipeline: configuration, file formats
//! and the five subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod files;

pub use commands::{Context, Options};
pub use config::ExperimentConfig;
pub use error::{CliError, ExitStatus};
