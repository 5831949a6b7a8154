//! Experiment runner for the `capwave-core` solvers: JSON configuration,
//! figure presets, and CSV/JSON artifacts with a manifest.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;

pub use commands::run;
pub use config::{Command, ExperimentConfig};
pub use error::CliError;
