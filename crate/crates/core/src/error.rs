use thiserror::Error;

/// Coarse error class, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Caller passed arguments that violate a precondition.
    Usage,
    /// Input data failed a structural check (norms, angle ranges).
    Validation,
    /// The request exceeds a configured resource limit.
    Resource,
}

#[derive(Debug, Error, PartialEq)]
pub enum SealError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("tensor product of an empty factor list")]
    EmptyProduct,
    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("row {row} of the coefficient matrix is not normalized (squared norm {norm_sqr})")]
    RowNotNormalized { row: usize, norm_sqr: f64 },
    #[error("operator entries: expected {expected} values for dimension {dim}, found {found}")]
    BadOperatorShape { dim: usize, expected: usize, found: usize },
    #[error("message {message} out of range for dimension {dim}")]
    MessageOutOfRange { message: usize, dim: usize },
    #[error("theta[{index}] = {theta} outside [0, pi/4]")]
    ThetaOutOfRange { index: usize, theta: f64 },
    #[error("bit string and angle list lengths differ ({bits} bits, {thetas} angles)")]
    ThetaCount { bits: usize, thetas: usize },
    #[error("empty bit string")]
    EmptyBits,
    #[error("{name} = {value} outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("dimension {0} is too small (need at least 2)")]
    DimensionTooSmall(usize),
    #[error("dimension {dim} exceeds the limit of {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("trial count must be at least 1")]
    ZeroTrials,
    #[error("decoded value {decoded} has zero marginal probability")]
    ZeroMarginal { decoded: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid probability row: {0}")]
    InvalidDistribution(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl SealError {
    pub fn kind(&self) -> ErrorKind {
        use SealError::*;
        match self {
            NotNormalized { .. }
            | RowNotNormalized { .. }
            | ThetaOutOfRange { .. }
            | ThetaCount { .. }
            | EmptyBits
            | BadOperatorShape { .. }
            | InvalidDistribution(_) => ErrorKind::Validation,
            DimensionTooLarge { .. } => ErrorKind::Resource,
            _ => ErrorKind::Usage,
        }
    }
}

pub type Result<T, E = SealError> = std::result::Result<T, E>;
