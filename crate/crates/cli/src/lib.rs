//! Command-line front end for `effthermo-core`: TOML scenario configs,
//! CSV/JSON ledgers, audit summaries and parameter sweeps.

pub mod app;
pub mod config;
pub mod ledger;

use std::path::Path;

/// Errors map to exit code 2; failed audits are reported separately with
/// exit code 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid config at `{location}`: {message}")]
    Config { location: String, message: String },
    #[error(transparent)]
    Core(#[from] effthermo_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { location: location.into(), message: message.into() }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}
