use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("integer overflow in the chosen coefficient type")]
    Overflow,
    #[error("negative input {0} where a non-negative integer is required")]
    Negative(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("node budget of {limit} exceeded")]
    BudgetExceeded { limit: usize },
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error("malformed document: {0}")]
    Document(String),
}

/// Parse failure with the byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {pos}")]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("implicit multiplication is not allowed; write `*`")]
    ImplicitMultiplication,
    #[error("exponent {0} exceeds the maximum of 64")]
    ExponentOverflow(String),
    #[error("non-polynomial construct: {0}")]
    NonPolynomial(&'static str),
    #[error("integer literal does not fit the coefficient type")]
    LiteralOverflow,
}
