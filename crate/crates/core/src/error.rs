use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode {index} has zero frequency (m = 0 and k = 0)")]
    ZeroFrequencyMode { index: usize },

    #[error("mode {index} has nonpositive weight {weight}")]
    NonpositiveWeight { index: usize, weight: f64 },

    #[error("duplicate momentum at mode {index}")]
    DuplicateMode { index: usize },

    #[error("grid has no modes")]
    EmptyGrid,

    #[error("expected a {expected}-dimensional point, found {found} coordinates")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("spatial cutoff is negative ({value}) at quadrature node {index}")]
    NegativeSpatialCutoff { index: usize, value: f64 },

    #[error("invalid cutoff: {0}")]
    InvalidCutoff(String),

    #[error("basis dimension {dimension} exceeds the configured limit {limit}")]
    BasisTooLarge { dimension: u128, limit: usize },

    #[error("truncation N_max = {n_max} is too small, need at least {required}")]
    TruncationTooSmall { n_max: usize, required: usize },

    #[error("coupling must be nonnegative, got {0}")]
    NegativeCoupling(f64),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("shift {shift} does not make the operator positive definite (spectrum floor {floor})")]
    IndefiniteShift { shift: f64, floor: f64 },

    #[error("zero vector")]
    ZeroVector,

    #[error("epsilon {epsilon} outside the admissible interval (0, {upper})")]
    EpsilonOutOfRange { epsilon: f64, upper: f64 },

    #[error("E0 = {energy} is not below the bottom {floor} of the free spectrum off the vacuum")]
    SpectralConditionViolated { energy: f64, floor: f64 },

    #[error("vector does not match basis: {0}")]
    BasisMismatch(String),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
