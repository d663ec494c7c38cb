//! Experiment runner behind the `krein-lab` binary.
//!
//! Each subcommand writes its payload files plus `manifest.json` into one
//! output directory. Exit codes: 0 when every invariant check passed, 2 on an
//! invariant violation, 1 on input or IO errors.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt::Display;
use std::path::PathBuf;

use config::ConfigError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {error}", path.display())]
    Config { path: PathBuf, error: ConfigError },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{what}: {message}")]
    Input { what: String, message: String },
}

impl CliError {
    pub fn input(what: impl Into<String>, e: impl Display) -> Self {
        CliError::Input {
            what: what.into(),
            message: e.to_string(),
        }
    }

    pub fn bad_config(error: ConfigError) -> Self {
        CliError::Input {
            what: format!("config key `{}`", error.key),
            message: error.message,
        }
    }

    pub const EXIT_CODE: i32 = 1;
}
