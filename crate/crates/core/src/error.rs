use thiserror::Error;

/// Errors raised by the process, likelihood and inference routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("kernel evaluated at negative elapsed time {0}")]
    NegativeDelta(f64),

    #[error("time regression: state is at t={current}, requested t={requested}")]
    TimeRegression { current: f64, requested: f64 },

    #[error("times must be strictly increasing (t[{index}]={time} after {previous})")]
    NonIncreasingTimes {
        index: usize,
        time: f64,
        previous: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("covariance matrix is singular or not positive definite")]
    SingularCovariance,

    #[error("observation does not match the {expected} likelihood family")]
    FamilyMismatch { expected: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),
}

pub type Result<T> = std::result::Result<T, Error>;
