use thiserror::Error;

/// Errors raised by library entry points.
///
/// Search outcomes that are merely inconclusive (exhausted budgets, greedy
/// failures) are not errors; they are reported through the return types of
/// the individual algorithms.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("degenerate bandwidth budget: floor({beta} * {n}) = 0 but the guest graph has edges")]
    DegenerateBandwidth { beta: String, n: usize },

    #[error("config error in {path}: {message}")]
    Config { path: String, message: String },

    #[error("verification tripwire: {0}")]
    Tripwire(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
