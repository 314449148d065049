use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported field order {0}")]
    UnsupportedField(u32),
    #[error("modulus is reducible")]
    ReducibleModulus,
    #[error("division by zero in a finite field")]
    DivisionByZero,
    #[error("conjugation needs a field of square order, got {0}")]
    UnsupportedConjugation(u32),
    #[error("invalid polar space: {0}")]
    InvalidSpace(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("generator budget exceeded: {count} generators, budget {budget}")]
    BudgetExceeded { count: String, budget: u64 },
    #[error("degenerate hyperplane section")]
    DegenerateHyperplane,
    #[error("operation not available for this space: {0}")]
    WrongFamily(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
