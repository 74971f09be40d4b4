use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} requires a positive size, got 0")]
    ZeroSize { what: &'static str },

    #[error("duplicate point {0:?}")]
    DuplicatePoint(Vec<u64>),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("refusing to materialize {requested} points (cap is {cap})")]
    CapExceeded { requested: u64, cap: u64 },

    #[error("enumeration needs {needed} candidate subsets, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("precondition of {step} violated: {detail}")]
    Precondition { step: &'static str, detail: String },

    /// A rearrangement move broke one of its own invariants. This is a bug,
    /// never a property of the input.
    #[error("rearrangement invariant broken at {step}: {detail}")]
    Invariant { step: String, detail: String },
}
