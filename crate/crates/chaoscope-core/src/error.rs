//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by parsing, validation and the engines.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed JSON document.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    /// A specification document failed validation.
    #[error("invalid spec: {0}")]
    Invalid(String),

    /// A vector lies outside the operator's index domain.
    #[error("domain mismatch: {0}")]
    Domain(String),

    /// A composition the engines cannot analyse exactly.
    #[error("unsupported composition: {0}")]
    Unsupported(String),

    /// Spectral query at a point of an essential curve.
    #[error("boundary point: {0}")]
    BoundaryPoint(String),

    /// Truncation size beyond the configured cap.
    #[error("truncation size {requested} exceeds cap {cap}")]
    TruncationCap { requested: usize, cap: usize },

    /// Argument outside its documented range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// Name not present in the gallery.
    #[error("unknown gallery entry: {0}")]
    UnknownName(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub fn out_of_range(msg: impl Into<String>) -> Self {
        Error::OutOfRange(msg.into())
    }
}
