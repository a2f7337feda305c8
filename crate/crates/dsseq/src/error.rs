use thiserror::Error;

use crate::tower::Magnitude;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("alphabet size {size} exceeds search cap {cap}")]
    CapExceeded { size: usize, cap: usize },

    /// The requested value does not fit in the configured budget. `needed`
    /// is the exact size when known, otherwise a tower-form bound.
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: String,
        needed: Box<Magnitude>,
        budget: u64,
    },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
