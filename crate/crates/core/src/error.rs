use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point count mismatch: {left} vs {right} (equal sizes are required)")]
    CountMismatch { left: usize, right: usize },

    #[error("input is not sorted in nondecreasing order (index {0})")]
    Unsorted(usize),

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("direction is not a unit vector (norm {0})")]
    NonUnitDirection(f64),

    #[error("empty input")]
    Empty,

    #[error("matrix columns are not linearly independent")]
    RankDeficient,

    #[error("frame columns are not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("exhaustive enumeration is limited to n <= {max}, got n = {n}")]
    TooLarge { n: usize, max: usize },

    #[error("coupling marginals violated: {0}")]
    Marginal(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
