//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A vector or matrix had the wrong length for the operation.
    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// An input that must be finite contained NaN or an infinity.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Rejection sampling for task placement ran out of attempts.
    #[error("task sampling exceeded {attempts} rejection attempts")]
    SamplingExhausted { attempts: usize },

    /// Behavior characterizations of different kinds were compared.
    #[error("behavior characterization mismatch: {0}")]
    BehaviorMismatch(String),

    /// The worker exchange produced an incomplete or inconsistent packet set.
    #[error("worker protocol violation: {0}")]
    Protocol(String),

    /// A textual artifact (checkpoint, task record, packet dump) failed to parse.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
