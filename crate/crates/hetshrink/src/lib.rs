//! Configuration files, output formats, parallel Monte Carlo and the
//! command implementations behind the `hetshrink` binary.

#![forbid(unsafe_code)]

pub mod commands;
pub mod config;
mod error;
pub mod output;
pub mod parallel;

pub use error::CliError;
pub use hetshrink_core as core;
