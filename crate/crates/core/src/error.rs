use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error(
        "grid too small for n_max: |u_{n}(x_max)| = {value:.3e} exceeds {bound:.0e} at x_max = {x_max}"
    )]
    GridTooSmall { n: usize, value: f64, bound: f64, x_max: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("function has zero L2 norm")]
    ZeroNorm,

    #[error(
        "pulse transform support reaches |chi*lambda0*t| = {required:.3} but the position grid \
         only resolves up to {available:.3} (required window: t in [-{window:.3}, {window:.3}])"
    )]
    WindowExceeded { required: f64, available: f64, window: f64 },

    #[error("measurement outcome has vanishing probability ({0:.3e})")]
    VanishingProbability(f64),

    #[error("thermal tail mass {tail:.3e} beyond n_max = {n_max} exceeds 1e-3; increase n_max")]
    TruncationTooSmall { tail: f64, n_max: usize },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("unsupported target: {0}")]
    UnsupportedTarget(String),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}
