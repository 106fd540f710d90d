use num_complex::Complex64;
use thiserror::Error;

/// Failures reported by the evaluation, inversion and certification layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ultraspherical index must be at least 1, got {0}")]
    InvalidIndex(i64),

    #[error("point {0} is outside the domain of {1}")]
    Domain(Complex64, &'static str),

    #[error("non-finite input {0}")]
    NonFinite(Complex64),

    #[error("derivative is singular at {0}")]
    Singular(Complex64),

    #[error("quadrature reached {achieved:e}, target was {target:e}")]
    Precision { achieved: f64, target: f64 },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("Newton iteration did not converge at target {target} (residual {residual:e})")]
    Convergence { target: Complex64, residual: f64 },

    #[error("continuation stalled at {at} while tracking target {target}")]
    Continuation { at: Complex64, target: Complex64 },

    #[error("empty grid")]
    EmptyGrid,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
