use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid spec: {0}")]
    InvalidGridSpec(String),

    #[error("density is not normalized (total mass {0})")]
    NotNormalized(f64),

    #[error("negative density value {value} at cell {index}")]
    NegativeDensity { index: usize, value: f64 },

    #[error("no sample fell inside the grid bounds")]
    EmptySupport,

    #[error("Rényi order must be >= 0, got {0}")]
    NegativeOrder(f64),

    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fast convolution clamped {0:.3e} of negative round-off mass (limit 1e-10)")]
    ClampExceeded(f64),

    #[error("pushforward lost {lost:.3e} mass outside the target grid (limit {limit:.1e})")]
    Coverage { lost: f64, limit: f64 },

    #[error("Lipschitz estimation failed: {0}")]
    LipschitzEstimation(String),

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("configuration size mismatch: {0}")]
    SizeMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("covariance is singular or indefinite: {0}")]
    DegenerateCovariance(String),

    #[error("hypothesis violated for {theorem}: {detail}")]
    Hypothesis { theorem: String, detail: String },

    #[error("unknown theorem id {0:?}")]
    UnknownTheorem(String),

    #[error("map kind {0} carries function values and cannot be serialized")]
    EphemeralKind(&'static str),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed grid file: {0}")]
    GridFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
