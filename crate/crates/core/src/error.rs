use thiserror::Error;

/// Errors raised by the walk, polytope and quantum routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation is not defined for this kind of input.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// The requested object is too large to materialize.
    #[error("capacity exceeded for {what}: limit {limit}, requested {requested}")]
    Capacity {
        what: &'static str,
        limit: usize,
        requested: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A constructed value violates one of its invariants.
    #[error("invalid {what}: {reason}")]
    Invariant { what: &'static str, reason: String },

    #[error("transition matrix is not ergodic (e_max = {0})")]
    NotErgodic(f64),
}

impl WalkError {
    pub(crate) fn invariant(what: &'static str, reason: impl Into<String>) -> Self {
        WalkError::Invariant {
            what,
            reason: reason.into(),
        }
    }

    pub(crate) fn check_len(expected: usize, got: usize) -> Result<(), Self> {
        if expected == got {
            Ok(())
        } else {
            Err(WalkError::DimensionMismatch { expected, got })
        }
    }
}

pub type Result<T, E = WalkError> = std::result::Result<T, E>;
