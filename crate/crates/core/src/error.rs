use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid resonance plan: {0}")]
    InvalidPlan(String),

    #[error("plan is not eligible: {0}")]
    IneligiblePlan(String),

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("momentum {momentum:?} lies outside the lattice window")]
    OutOfWindow { momentum: Vec<i64> },

    #[error(
        "truncation{}: tail mass {tail_mass:e} on rotor {} exceeds tolerance {tolerance:e}",
        step.map(|t| format!(" at step {t}")).unwrap_or_default(),
        rotor + 1
    )]
    Truncation {
        step: Option<usize>,
        /// Zero-based.
        rotor: usize,
        tail_mass: f64,
        tolerance: f64,
    },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Attach a step index to a truncation error raised inside a propagator.
    pub fn at_step(self, t: usize) -> Self {
        match self {
            Error::Truncation {
                rotor,
                tail_mass,
                tolerance,
                ..
            } => Error::Truncation {
                step: Some(t),
                rotor,
                tail_mass,
                tolerance,
            },
            other => other,
        }
    }
}
