use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus {0} is not an odd prime below 2^63")]
    BadModulus(u64),
    #[error("modulus polynomial is not monic irreducible")]
    NotIrreducible,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("function evaluated at one of its poles")]
    Pole,
    #[error("singular curve (zero discriminant)")]
    SingularCurve,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("point has wrong order: {0}")]
    WrongOrder(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("singular linear system")]
    SingularSystem,
    #[error("value does not descend to the base field: {0}")]
    NoDescent(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("context mismatch: {0}")]
    Mismatch(String),
    #[error("not available: {0}")]
    Unavailable(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("integrity check failed: {0}")]
    Integrity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Length { expected, got })
    }
}
