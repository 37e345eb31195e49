use thiserror::Error;

/// Errors raised by family algebra, formula engines, builders and the oracle.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{what}: n={n} exceeds the supported maximum {max}")]
    TooLarge {
        what: &'static str,
        n: u32,
        max: u32,
    },

    #[error("ground sizes differ: {left} vs {right}")]
    GroundSizeMismatch { left: u32, right: u32 },

    #[error("mask {mask:#b} is not a subset of [{n}]")]
    MaskOutOfRange { mask: u32, n: u32 },

    #[error("invalid shift pair: {0}")]
    InvalidShiftPair(String),

    #[error("{what} = {value} is out of range (allowed {min}..={max})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        min: u64,
        max: u64,
    },

    #[error("a={a} does not have the parity of n={n}")]
    ParityMismatch { n: u32, a: u32 },

    #[error("{0} is not convex")]
    NotConvex(&'static str),

    #[error("families are not strictly nested")]
    NotNested,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("methods disagree at Phi({n},{m}): fast={fast}, recursive={recursive}")]
    MethodDisagreement {
        n: u32,
        m: u64,
        fast: u64,
        recursive: u64,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(what: &'static str, value: u64, min: u64, max: u64) -> Error {
    Error::OutOfRange {
        what,
        value,
        min,
        max,
    }
}
