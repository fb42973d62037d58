use std::path::Path;

use thiserror::Error;

/// Everything that ends a run before a report is produced; all exit with code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    /// A config file that failed to parse, located to line and column.
    #[error("{path}:{line}:{column}: {message}")]
    Config {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    /// A config file that parsed but describes an invalid experiment.
    #[error("{path}: {source}")]
    Invalid {
        path: String,
        source: finite_bb84::Error,
    },

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error(transparent)]
    Library(#[from] finite_bb84::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
