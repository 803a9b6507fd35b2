//! Command-line driver for the shell compatibility experiments: TOML
//! configuration, grid sweeps, and JSON/CSV residual reports.

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::{OutputFormat, RunConfig};
pub use error::CliError;
pub use report::{Expectation, ResidualReport};
pub use run::{run, write_outputs};
