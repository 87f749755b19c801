use thiserror::Error;

/// Errors produced by the spectral machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Carries the smallest singular value of the real representation.
    #[error("operator not invertible to tolerance (sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e})")]
    NotInvertible { sigma_min: f64, sigma_max: f64 },

    #[error("point outside the function domain: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numerical failure at {location}: {what}")]
    Numerical { what: String, location: String },

    #[error("schema error at {path}: {msg}")]
    Schema { path: String, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
