use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range for vector of length {len}")]
    IndexOutOfRange { index: i64, len: usize },

    #[error("coordinates {i} and {j} coincide (gap {gap:e})")]
    Collision { i: usize, j: usize, gap: f64 },

    #[error("configuration is not ordered")]
    Unordered,

    #[error("degenerate parameters at n = {n}: {reason}")]
    DegenerateParameter { n: usize, reason: String },

    #[error("parameters outside the supported regime: {0}")]
    OutOfRegime(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("polynomial has non-real roots (max |Im| = {max_imag:e})")]
    NonRealRoots { max_imag: f64 },

    #[error("step size underflow at t = {t}: dt = {dt:e} < dt_min; state = {state:?}")]
    Stiffness { t: f64, dt: f64, state: Vec<f64> },

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("divergence: {0}")]
    Divergence(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
