use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("t = {t} is not above the threshold {threshold}")]
    BelowThreshold { t: i64, threshold: i64 },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("entries must have gcd 1 (found {0})")]
    GcdNotOne(u64),

    #[error("bound propagation could not bound variable x{var}")]
    Unbounded { var: usize },

    #[error("digit {digit} at position {index} is outside 0..{base}")]
    DigitRange { index: usize, digit: i128, base: i128 },

    #[error("value {value} at position {index} is outside [0, {base}^{digits})")]
    OutOfRange {
        index: usize,
        value: i128,
        base: i128,
        digits: u32,
    },

    #[error("quotient is not an integer-valued polynomial: {0}")]
    NonIntegerQuotient(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
