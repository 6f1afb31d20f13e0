//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by sampling, estimation, and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A distribution parameter violates its domain (e.g. non-positive sd).
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A correlation coefficient outside the open interval (-1, 1).
    #[error("correlation must lie strictly inside (-1, 1), got {0}")]
    InvalidCorrelation(f64),

    /// Factor groups do not partition the factor set.
    #[error("invalid factor groups: {0}")]
    InvalidGroups(String),

    /// The model output is constant; sensitivity indices are undefined.
    #[error("model output has zero variance; sensitivity indices are undefined")]
    DegenerateOutput,

    /// A model evaluation returned a non-finite value.
    #[error("non-finite model evaluation at row {row} of {matrix}")]
    NonFiniteEvaluation { matrix: String, row: usize },

    /// A matrix required to be positive definite failed its Cholesky factorization.
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    /// A linear system is singular to working precision.
    #[error("singular linear system")]
    SingularMatrix,

    /// Catch-all for argument validation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// ODE integration failure.
    #[error("ode integration failed: {0}")]
    Ode(#[from] OdeError),
}

/// Failures specific to the ODE integrators.
#[derive(Debug, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("non-finite derivative at t = {t}")]
    NonFiniteDerivative { t: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t}")]
    MaxStepsExceeded { max_steps: usize, t: f64 },

    #[error("newton iteration failed to converge repeatedly at t = {t}")]
    NewtonFailure { t: f64 },

    #[error("invalid integration setup: {0}")]
    InvalidSetup(String),
}

/// Convenient result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
