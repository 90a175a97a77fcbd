use thiserror::Error;

/// Errors surfaced by every verification module.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),
    #[error("degenerate point: {0}")]
    DegeneratePoint(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("division remainder: {0}")]
    DivisionRemainder(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("quadrature health: {0}")]
    QuadratureHealth(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Parse(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
