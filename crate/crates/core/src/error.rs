use thiserror::Error;

/// Errors raised by the library. Identity failures are never errors; they
/// are reported as failing records by the verification routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial division left a nonzero remainder")]
    NonExactDivision,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("exponent {0} is not a multiple of 1/8")]
    ExponentNotRepresentable(String),
    #[error("transform undefined: {0}")]
    UndefinedTransform(String),
    #[error("partition {lambda:?} out of range: {reason}")]
    LambdaOutOfRange { lambda: Vec<usize>, reason: String },
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("parameters excluded by case ({case}): {reason}")]
    ExcludedCase { case: char, reason: String },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

pub type Result<T> = std::result::Result<T, Error>;
