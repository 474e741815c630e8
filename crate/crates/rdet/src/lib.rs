//! Experiments, file formats and the command line for `rdet-core`.

pub mod cli;
pub mod compute;
pub mod config;
mod error;
pub mod experiments;
pub mod export;

pub use error::{Error, Result, EXIT_BOUND_FAILURE, EXIT_BUDGET, EXIT_PASS, EXIT_USAGE};
