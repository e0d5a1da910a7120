use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}]: endpoints must satisfy 1 <= lo <= hi")]
    InvalidInterval { lo: String, hi: String },

    #[error("invalid window [{a}, {b}]: expected a <= b")]
    InvalidWindow { a: String, b: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("comparison undecided at the precision cap of {cap_bits} bits")]
    UndecidedComparison { cap_bits: u32 },

    #[error("set has {count} members, more than the element cap of {cap}")]
    ElementCapExceeded { count: String, cap: u64 },

    #[error("certification failed for term {term}: {reason}")]
    CertificationFailed { term: String, reason: String },

    #[error("search examined more than {budget} candidate pairs")]
    SearchSpaceExceeded { budget: u64 },

    #[error("set spec: {0}")]
    SetSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
