//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// A gamma product did not cancel to the rational * pi^p * sqrt(3)^q basis.
    #[error("not closed: {0}")]
    NotClosed(String),

    #[error("series did not converge: {0}")]
    Divergence(String),

    /// Quadrature or summation ran out of budget. Carries the best estimate
    /// and the tolerance actually achieved so callers can decide.
    #[error("did not reach tolerance: achieved {achieved:.3e}, requested {requested:.3e}")]
    Budget {
        best: f64,
        achieved: f64,
        requested: f64,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
