use thiserror::Error;

use crate::exact::ExactScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    /// The verifier table is missing an entry or is malformed.
    #[error("configuration error: {0}")]
    Config(String),

    /// The prover failed to supply a message the verifier needed.
    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("input {0:?} is not of the form ({{0,1}}+#)({{0,1}}+#)+")]
    InvalidForm(String),

    #[error("parse error at position {position} ({token:?}): {reason}")]
    Parse {
        token: String,
        position: usize,
        reason: String,
    },

    #[error("{what} is {size}, above the enumeration limit of {limit}; use sampling instead")]
    LimitExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("selection has {got} entries but the instance has {expected} values")]
    SelectionLength { expected: usize, got: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unresolved probability mass {0} remains after the step cap")]
    Unresolved(ExactScalar),

    /// Two independent computations of the same quantity disagreed.
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}
