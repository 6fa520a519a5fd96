use thiserror::Error;

#[derive(Debug, Error)]
pub enum LopError {
    #[error("mode count must be at least 1")]
    ZeroModes,

    #[error("sector of {modes} modes and {photons} photons has dimension {dimension}, above the limit {limit}")]
    SectorTooLarge {
        modes: usize,
        photons: usize,
        dimension: usize,
        limit: usize,
    },

    #[error("integer overflow computing the dimension of {modes} modes with {photons} photons")]
    DimensionOverflow { modes: usize, photons: usize },

    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: String, found: String },

    #[error("invalid occupation vector: {0}")]
    InvalidOccupation(String),

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unitary: max |M^dag M - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not anti-Hermitian: max |A + A^dag| = {deviation:e}")]
    NotAntiHermitian { deviation: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state norm {norm_sqr} exceeds 1 beyond tolerance")]
    NormTooLarge { norm_sqr: f64 },

    #[error("state is not normalized: squared norm {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("matrix logarithm failed: {0}")]
    LogarithmFailed(String),

    #[error("infeasible extension: {0}")]
    Infeasible(String),

    #[error("parameters violate the normalization condition: value {value} (expected 1)")]
    Unnormalized { value: f64 },

    #[error("outcome {outcome} exceeds the {total} photons present")]
    OutcomeOutOfRange { outcome: usize, total: usize },

    #[error("quantum efficiency {0} outside [0, 1]")]
    InvalidEfficiency(f64),

    #[error("conditional event has zero probability: {0}")]
    ZeroProbability(String),

    #[error("invalid circuit element: {0}")]
    InvalidElement(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix of size {0} is too large for the permanent routine")]
    PermanentTooLarge(usize),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LopError>;
