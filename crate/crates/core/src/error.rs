//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Error`]. Variants are
//! grouped by the kind of contract that was violated rather than by module,
//! so callers can match on the failure class without caring where it came
//! from.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical quantity left its admissible domain (negative intensity,
    /// contact outside the calibrated envelope, feed beyond travel, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument violated a structural precondition (wrong feature count,
    /// empty input, invalid hyperparameter, malformed permutation, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A data-collection protocol cannot be satisfied (e.g. a constant-force
    /// pass requesting more force than the finger can produce).
    #[error("protocol error: {0}")]
    Protocol(String),

    /// The normal-equation system of a linear fit has no unique solution.
    #[error("singular system: {0}")]
    Singular(String),

    /// The grasp controller observed something it cannot recover from.
    #[error("controller error: {0}")]
    Controller(String),

    /// A finger ray never reaches the object's cross-section.
    #[error("contact miss: finger {finger} does not reach the object")]
    ContactMiss { finger: usize },

    /// Text data (CSV) failed to parse; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn protocol(msg: impl Into<String>) -> Self {
        Error::Protocol(msg.into())
    }
}
