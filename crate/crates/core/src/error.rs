use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("moment table covers order {available}, but order {required} is required")]
    InsufficientOrder { required: u32, available: u32 },

    #[error(
        "ambiguous numerical rank: spectral gap {gap:.3e} is below the required {required:.1e} \
         (increase moment precision)"
    )]
    AmbiguousRank { gap: f64, required: f64 },

    #[error("order-2 symbol is not positive definite (minimum eigenvalue {min_eigenvalue})")]
    NotElliptic { min_eigenvalue: String },

    #[error("weight not positive on ball (mean of weight = {0})")]
    WeightNotPositive(String),

    #[error("weight is not positive at sample point {0:?}")]
    NonPositiveWeightSample(Vec<f64>),

    #[error("inadmissible probe: center {center:?}, radius {radius}")]
    InadmissibleProbe { center: Vec<String>, radius: String },

    #[error("acceptance rate {rate:.2e} below 1e-3; the body looks degenerate")]
    LowAcceptance { rate: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
