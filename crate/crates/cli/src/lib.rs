//! Command-line front end: argument parsing, document I/O and the
//! subcommand implementations. `main.rs` only prints and sets the exit code.

pub mod commands;
pub mod documents;

use std::fmt::Display;

pub use commands::{run, Cli, Outcome};

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// The property holds, or the statement is proven.
    Holds = 0,
    /// Refuted; the output carries a witness.
    Refuted = 1,
    /// Budget exhausted, or a usage or input error.
    Inconclusive = 2,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{file}{}: {message}", if path.is_empty() { String::new() } else { format!(" at {path}") })]
    Document {
        file: String,
        path: String,
        message: String,
    },
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] fuglede_core::Error),
}

impl CliError {
    pub fn document(source: &str, path: impl Into<String>, message: impl Display) -> Self {
        CliError::Document {
            file: source.to_string(),
            path: path.into(),
            message: message.to_string(),
        }
    }
}
