use thiserror::Error;

/// Errors raised by the algebra, enumeration and verification layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("variable sets differ: {0}")]
    ArityMismatch(String),

    #[error("exponent leaves the quarter grid: {0}")]
    GridViolation(String),

    #[error("non-integer coefficient in a K-theory class: {0}")]
    NonIntegerCoefficient(String),

    #[error("trivial bracket [1] in a denominator")]
    DivisionByTrivialBracket,

    #[error("denominator vanishes at the evaluation point")]
    DenominatorVanishes,

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
