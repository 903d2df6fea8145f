use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    Domain(String),
    /// A scalar argument exceeds the supported numeric range.
    Range {
        what: &'static str,
        value: u64,
        max: u64,
    },
    /// An enumeration would exceed its size guard.
    Capacity {
        what: &'static str,
        required: u128,
        limit: u128,
    },
    /// Input probabilities do not sum to one within tolerance.
    NotNormalized { norm: f64, tolerance: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Range { what, value, max } => {
                write!(f, "range error: {what} = {value} exceeds supported maximum {max}")
            }
            Error::Capacity { what, required, limit } => {
                write!(f, "capacity error: {what} requires {required} entries, limit is {limit}")
            }
            Error::NotNormalized { norm, tolerance } => write!(
                f,
                "normalization error: total probability {norm} differs from 1 by more than {tolerance:e}"
            ),
        }
    }
}

impl core::error::Error for Error {}
