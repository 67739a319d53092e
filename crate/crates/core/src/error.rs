use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("unsupported field degree m={0}; expected one of 2, 3, 5, 7")]
    UnsupportedDegree(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error(
        "syndrome table for n={n} with {check_bits} check bits exceeds the enumeration budget"
    )]
    TableTooLarge { n: usize, check_bits: usize },
    #[error("packet of length {needed} starting at {tau0} overflows a window of {nobs} samples")]
    WindowOverflow {
        tau0: usize,
        needed: usize,
        nobs: usize,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
