//! Error type shared by all library modules.

use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A caller-supplied value violates a documented precondition on shape,
    /// range or emptiness.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An ODE trajectory left the numerically trustworthy region.
    #[error("numerical blowup at step {step}: {detail}")]
    NumericalBlowup { step: usize, detail: String },

    /// Picard iteration hit its iteration budget before the stopping rule.
    #[error("no convergence after {iterations} iterations (last step norm {last_step:e})")]
    NonConvergence { iterations: usize, last_step: f64 },

    /// A mathematical precondition (e.g. contraction) does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The operation is only defined for a restricted configuration.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// No admissible fit window was found on a scaling curve.
    #[error("dimension estimation failed: {0}")]
    EstimationFailed(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed on-disk data (point clouds, matrices).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
