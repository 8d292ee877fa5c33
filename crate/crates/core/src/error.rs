use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("eigensolver did not converge after {sweeps} sweeps (residual {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("family is not nested: set {index} has a point {excess:e} away from its predecessor")]
    NotNested { index: usize, excess: f64 },

    #[error("halfplane intersection is empty")]
    EmptyIntersection,

    #[error("angle grids differ ({left} vs {right} directions)")]
    GridMismatch { left: usize, right: usize },

    #[error("horizon {horizon} from block {k} cannot certify the tail (needs at least {needed})")]
    HorizonTooSmall { k: usize, horizon: usize, needed: usize },

    #[error("tail unions did not stabilize below {eps:e} before k cap {cap} (last distance {last:e})")]
    NoConvergence { cap: usize, eps: f64, last: f64 },

    #[error("crosscheck gap {gap:e} exceeds the consistency limit {limit:e}")]
    InconsistentResult { gap: f64, limit: f64 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error(
        "no block within {cap} indices comes within {target:e} of extreme point {point} (level {m}, bucket {j})"
    )]
    ScanExhausted {
        m: usize,
        j: usize,
        point: Complex64,
        target: f64,
        cap: usize,
    },

    #[error("block index {n} is below the tail start {k}")]
    IndexBelowK { n: usize, k: usize },

    #[error("invalid convex weights: {0}")]
    InvalidWeights(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },
}

impl Error {
    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}
