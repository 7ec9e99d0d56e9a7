use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The argument sits on a pole of the function being evaluated.
    #[error("{function} has a pole at {at}")]
    Pole { function: &'static str, at: String },

    /// A precondition on the input was violated.
    #[error("invalid argument: {0}")]
    Domain(String),

    /// An iterative scheme ran out of refinement levels.
    #[error("no convergence after {levels} levels: best estimate {best:e}, last change {delta:e}")]
    NonConvergence {
        levels: usize,
        best: f64,
        delta: f64,
    },

    /// A truncated sum cannot meet the requested tail bound with the
    /// available number of terms.
    #[error("truncation insufficient: need {needed} terms, have {available}")]
    Truncation { needed: usize, available: usize },

    /// The cusp form space is zero-dimensional.
    #[error("S_{weight} is zero-dimensional")]
    EmptySpace { weight: u32 },

    /// The splitting Hecke operator has a numerically repeated eigenvalue.
    #[error("repeated Hecke eigenvalue in weight {weight}")]
    DegenerateSpectrum { weight: u32 },

    /// A matrix that must be invertible (or positive definite) is not.
    #[error("singular matrix: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;
