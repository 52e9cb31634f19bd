use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot subtract an infinite value from a finite one")]
    FiniteMinusInfinity,

    #[error("invalid number `{0}`")]
    InvalidNumber(String),

    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0} is not a prime field characteristic")]
    NotPrime(u64),

    #[error("line {line}: row index {index} out of range (presentation has {rows} generators)")]
    IndexOutOfRange { line: usize, index: usize, rows: usize },

    #[error("grade condition violated at entry ({row}, {col}): generator grade is not below relation grade")]
    GradeCondition { row: usize, col: usize },

    #[error("slope must be positive, got {0}")]
    NonPositiveSlope(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("contract violation: {0}")]
    Contract(String),
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    /// True for failures of an internal invariant rather than of the input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Contract(_))
    }
}
