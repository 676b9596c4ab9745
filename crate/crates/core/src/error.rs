use thiserror::Error;

/// Errors shared by all modules of the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid radial profile: {0}")]
    InvalidProfile(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "quadrature failed to converge: achieved estimate {achieved:e} \
         with error estimate {error:e} (target {target:e})"
    )]
    QuadNonConvergence {
        achieved: f64,
        error: f64,
        target: f64,
    },

    #[error("field support violates margin: {0}")]
    SupportMargin(String),

    #[error("overflow in modular evaluation: {0}")]
    Overflow(String),

    #[error("non-monotonic experiment output: {0}")]
    NonMonotonic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
