use thiserror::Error;

/// Errors raised by problem construction and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TcError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("value out of range: {0}")]
    Range(String),
    #[error("invalid probability distribution: {0}")]
    Probability(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("duplicate label `{label}` for party {party}")]
    DuplicateLabel { party: usize, label: String },
    #[error("invalid permutation: {0}")]
    Permutation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("search space of {count} exceeds budget {budget}")]
    Budget { count: u128, budget: u128 },
    #[error("quantum strategy has no shared state")]
    MissingState,
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NonHermitian(f64),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, TcError>;
