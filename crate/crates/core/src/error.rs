use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AvError {
    #[error("series of length {len} is too short (need at least {min})")]
    InvalidLength { len: usize, min: usize },

    #[error("window length {n} is not admissible for a series of length {len}")]
    InvalidScale { n: usize, len: usize },

    #[error("lag {lag} is outside the admissible range [{min}, {max}] for window length {n}")]
    InvalidLag {
        lag: usize,
        n: usize,
        min: usize,
        max: usize,
    },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("kernel is only defined on 1..={domain}, requested length {len}")]
    Domain { domain: usize, len: usize },

    #[error("dense covariance of order {len} exceeds the cap of {cap}")]
    Resource { len: usize, cap: usize },

    #[error("degenerate data: {0}")]
    Data(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, AvError>;
