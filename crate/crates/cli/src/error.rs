use resonance_core::Error;
use thiserror::Error as ThisError;

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;
pub const EXIT_RESOURCE_CAP: i32 = 4;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("invalid configuration:\n{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Core(Error::Truncation { .. }) => EXIT_TRUNCATION,
            CliError::Core(Error::ResourceCap(_)) => EXIT_RESOURCE_CAP,
            CliError::Core(
                Error::InvalidPotential(_)
                | Error::InvalidPlan(_)
                | Error::IneligiblePlan(_)
                | Error::InvalidIndexSet(_)
                | Error::DimensionMismatch(_)
                | Error::OutOfWindow { .. }
                | Error::InvalidArgument(_),
            ) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_OTHER,
        }
    }
}
