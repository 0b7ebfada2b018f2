use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// One or more problem invariants do not hold; every violation is listed.
    #[error("invalid problem: {}", .0.join("; "))]
    InvalidProblem(Vec<String>),

    #[error("informed set is empty: cost {cost} does not exceed c_min {c_min}")]
    InformedSetEmpty { cost: f64, c_min: f64 },

    #[error("sampler starved after {attempts} rejected attempts")]
    Starved { attempts: usize },

    #[error("admissibility violated: cost {cost} is below the lower bound {lower_bound}")]
    AdmissibilityViolation { cost: f64, lower_bound: f64 },

    #[error("incumbent cost increased from {previous} to {new}")]
    CostIncreased { previous: f64, new: f64 },

    #[error("no solution yet")]
    NoSolution,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
