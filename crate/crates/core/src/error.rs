use thiserror::Error;

/// Errors raised by the series, geometry, sampling and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series could not reach its tail bound within the allowed terms.
    #[error("series did not converge: achieved tail bound {achieved:e} after {terms} terms")]
    Accuracy { achieved: f64, terms: usize },

    /// A geometric or tabulated input failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// An operation's precondition does not hold for the given inputs.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The requested method is not available for this input.
    #[error("capability error: {0}")]
    Capability(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
