//! Configuration parsing, figure presets and sweep drivers behind the `tlsim`
//! binary.

pub mod commands;
pub mod config;
pub mod error;

pub use config::{parse_config, RunConfig};
pub use error::{CliError, Result};
