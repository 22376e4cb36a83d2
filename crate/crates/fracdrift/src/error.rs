use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Hurst parameter must lie in (0,1), got {0}")]
    HurstOutOfRange(f64),

    #[error("weight w_H(t,s) is singular at s={s}, t={t}; use interior quadrature nodes")]
    WeightSingularity { s: f64, t: f64 },

    #[error("invalid observation grid: {0}")]
    InvalidGrid(String),

    #[error("covariance factorization failed: leading minor of order {minor} is not positive definite")]
    CholeskyNotPd { minor: usize },

    #[error("circulant embedding kept a negative eigenvalue ({min_eigenvalue:.3e}) after {doublings} doublings")]
    CirculantEmbeddingFailed { doublings: usize, min_eigenvalue: f64 },

    #[error("t={t} is not a grid point (mesh {mesh})")]
    NotOnGrid { t: f64, mesh: f64 },

    #[error("Fernique bound requires T > T0 = {t0:.6e}, got T={t}")]
    FerniqueOutOfValidity { t: f64, t0: f64 },

    #[error("moment order p={p} must exceed floor(2/(H-h)) = {p0}; small-order bound is {fallback:.6e}")]
    MomentOrderTooSmall { p: u32, p0: u32, fallback: f64 },

    #[error("bound validity requires t_n >= tau0 = {tau0:.6e}, got t_n={t}")]
    BelowTau0 { t: f64, tau0: f64 },

    #[error("invalid regime: {0}")]
    InvalidRegime(String),

    #[error("drift evaluation was non-finite at step {step} (state {state})")]
    NonFiniteDrift { step: usize, state: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
