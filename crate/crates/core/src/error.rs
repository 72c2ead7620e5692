use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("points do not affinely span R^{dim} (affine rank {rank})")]
    DegenerateInput { dim: usize, rank: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    #[error("projection did not converge after {iterations} iterations (gap {gap:e})")]
    NonConvergence { iterations: usize, gap: f64 },

    #[error("point lies outside the body")]
    OutsideBody,

    #[error("point lies outside the density support")]
    OutsideSupport,

    #[error("neither operand exposes a bounding box")]
    NoBoundingBox,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("affine transform is singular (|det| = {det:e})")]
    SingularTransform { det: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input")]
    EmptyInput,

    #[error("invalid moment order q = {0}")]
    InvalidQ(usize),

    #[error("moment estimate at n = {n} is not positive ({value:e}); increase reps")]
    NonPositiveMoment { n: usize, value: f64 },

    #[error("only {count} exceedances at the largest grid point (need 50); shrink the grid")]
    InsufficientTailMass { count: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid value for `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("check `{check}` failed: {source}")]
    Check {
        check: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), message: message.into() }
    }
}
