use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("subsystem factorization missing or incompatible: {0}")]
    Factorization(String),

    #[error("outcome {0} has zero probability")]
    ZeroProbability(usize),

    #[error("did not converge after {iterations} iterations (best value {best_value})")]
    NonConvergence {
        iterations: usize,
        best_value: f64,
        best_input: Vec<f64>,
    },

    #[error(
        "enumeration of {requested} items exceeds cap {cap}; use a sampling mode or raise the cap"
    )]
    CapExceeded { requested: u128, cap: u128 },

    #[error("states are linearly dependent (Gram determinant {0:e})")]
    LinearlyDependent(f64),

    #[error("map is not linear (deviation {0:e})")]
    NotLinear(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
