use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field configuration: {0}")]
    Config(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("elements from different fields or spaces")]
    Mismatch,
    #[error("value outside the operation's domain: {0}")]
    Domain(String),
    #[error("lattice is not integral")]
    NotIntegral,
    #[error("hermitian form is degenerate")]
    Degenerate,
    #[error("matrix is not hermitian")]
    NotHermitian,
    #[error("ambient space is split")]
    SplitSpace,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
