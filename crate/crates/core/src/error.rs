use thiserror::Error;

/// Errors raised across the numeric, statistical and algebraic layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("matrix is not symmetric")]
    NotSymmetric,

    /// The leading m1 x m1 block of the concatenated data is singular.
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("k = n*m2 - m1 = {0} must be positive")]
    NonPositiveK(i64),

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    #[error("maximum likelihood estimate does not exist: {0}")]
    MleNotExists(String),

    #[error("parameter regime violation: {0}")]
    RegimeViolation(String),

    #[error("groebner basis computation exceeded its budget of {0} pairs")]
    Timeout(usize),

    #[error("solution count {count} outside the expected range [{lower}, {upper}]")]
    CountOutOfRange {
        count: usize,
        lower: usize,
        upper: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
