use thiserror::Error;

/// Errors raised by the spectral engine and the layers built on it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The spectral parameter is too close to an eigenvalue of the homogeneous problem.
    #[error("near-singular spectral parameter: distance {distance:e} to eigenvalue {eigenvalue}")]
    NearSingular { eigenvalue: f64, distance: f64 },

    /// Eigenvalue bracketing did not converge.
    #[error("bracketing failed for eigenvalue index {index}: {reason}")]
    Bracketing { index: usize, reason: String },

    /// The ODE integrator could not meet its tolerance.
    #[error("integrator failure at x = {x}: {reason}")]
    Integrator { x: f64, reason: String },

    /// Quantities the theory asserts nonzero came out numerically negligible.
    #[error("degenerate data: {0}")]
    Degenerate(String),

    /// Inconsistent sweep or run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A problem-spec document could not be parsed.
    #[error("parse error at line {line}, field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
