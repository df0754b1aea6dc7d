use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("elliptic modulus {0} outside [0, 1)")]
    ModulusDomain(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("constraint violation: x-mean of transverse mode {mode} deviates by {relative:e} (relative)")]
    ConstraintViolation { mode: i64, relative: f64 },

    #[error("non-finite spectral coefficient at t = {t}")]
    NonFinite { t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
