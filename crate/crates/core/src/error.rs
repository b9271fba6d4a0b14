use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("hermitian symmetry violated: residual {residual:e} exceeds {tolerance:e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("weight overflow guard: radius·|ξ_n| = {exponent:.3} > {limit} at vertical mode {mode}")]
    WeightOverflow { exponent: f64, limit: f64, mode: i64 },

    #[error("continuation guard violated at t = {t}: radius {radius} < {floor}")]
    RadiusGuard { t: f64, radius: f64, floor: f64 },

    #[error("blowup at t = {t}: {reason}")]
    Blowup { t: f64, reason: String },

    #[error("degenerate denominator {0:e} in norm ratio")]
    DegenerateRatio(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("snapshot format: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
