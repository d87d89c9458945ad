use thiserror::Error;

/// Errors raised by the ring, ideal and exponent operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("enumeration of {what} needs {needed} elements, cap is {cap}")]
    CapExceeded {
        what: String,
        needed: String,
        cap: u64,
    },
    #[error("ring {0} is infinite and cannot be enumerated")]
    InfiniteRing(String),
    #[error("elements belong to different rings ({left} vs {right})")]
    DescriptorMismatch { left: String, right: String },
    #[error("invalid ring descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("ideal generated by {0} is not nilpotent")]
    NotNilpotent(String),
    #[error("modulus {0} is reducible modulo {1}")]
    ReducibleModulus(String, u64),
    #[error("chain has not been verified")]
    UnverifiedChain,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("parse error at {position}: {message} (expected {expected})")]
    Parse {
        position: usize,
        message: String,
        expected: String,
    },
}

impl Error {
    /// Stable category name, used by the command line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::CapExceeded { .. } => "CapExceeded",
            Error::InfiniteRing(_) => "InfiniteRing",
            Error::DescriptorMismatch { .. } => "DescriptorMismatch",
            Error::InvalidDescriptor(_) => "InvalidDescriptor",
            Error::NotNilpotent(_) => "NotNilpotent",
            Error::ReducibleModulus(..) => "ReducibleModulus",
            Error::UnverifiedChain => "UnverifiedChain",
            Error::PreconditionFailed(_) => "PreconditionFailed",
            Error::Parse { .. } => "ParseError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
