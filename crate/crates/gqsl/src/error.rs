use thiserror::Error;

/// Errors reported by state constructors, metric evaluations, and dynamics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the operation's domain (wrong shape, bad sign).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A state failed its validity checks (symmetry, physicality, purity).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A precondition documented on the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Linear algebra broke down (singular matrix, unpaired eigenvalues).
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// A result could not be produced to the requested accuracy.
    #[error("precision failure: {0}")]
    PrecisionFailure(String),

    /// Integration stopped: the trajectory left the physical set or the
    /// error budget was exhausted.
    #[error("integration failure at t = {t}: {message}")]
    IntegrationFailure { t: f64, message: String },

    /// The geodesic bound was violated beyond tolerance along a trajectory.
    #[error("bound violation at t = {t}: distance exceeds path length by {excess:e}")]
    BoundViolation { t: f64, excess: f64 },

    /// A trajectory is internally inconsistent (zero speed but finite angle).
    #[error("inconsistent trajectory: {0}")]
    InconsistentTrajectory(String),
}

pub type Result<T> = std::result::Result<T, Error>;
