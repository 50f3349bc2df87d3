use thiserror::Error;

/// Errors raised by the geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("matrix is not positive definite (pivot {pivot:e} below tolerance {tolerance:e})")]
    NotPositiveDefinite { pivot: f64, tolerance: f64 },

    #[error("point is not in the affine hull (residual {residual:e})")]
    NotInAffineHull { residual: f64 },

    #[error("affine flat has linearly dependent directions")]
    DegenerateFlat,

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("operation not supported for {0}")]
    Unsupported(&'static str),

    #[error("iteration cap of {0} exceeded")]
    MaxIterationsExceeded(usize),

    #[error("subset enumeration needs {count} subsets, budget is {budget}")]
    SubsetBudgetExceeded { count: u128, budget: u128 },

    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),

    #[error("candidate point is not in the body")]
    VNotInBody,

    #[error("segment and body are not disjoint (gap {gap:e})")]
    NotDisjoint { gap: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T> = std::result::Result<T, GeomError>;
