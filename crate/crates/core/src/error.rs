use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Distribution parameters that do not describe a valid density on [0,1].
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// Adaptive quadrature did not reach its tolerance on `[lo, hi]`.
    #[error("quadrature failed on [{lo}, {hi}]: {reason}")]
    Quadrature { lo: f64, hi: f64, reason: String },

    /// Malformed config fragment or grid specification.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidModel(msg.into())
    }
}
