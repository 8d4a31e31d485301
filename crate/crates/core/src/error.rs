use thiserror::Error;

use crate::decomp::Violation;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid tree decomposition: {}", format_violations(.0))]
    InvalidDecomposition(Vec<Violation>),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("problem syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("oracle refused: {0}")]
    OracleRefused(String),

    #[error("witness error: {0}")]
    Witness(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
