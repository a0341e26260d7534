use thiserror::Error;

/// Errors produced by the link solvers and the protocol machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time grid misaligned: {0}")]
    GridMisaligned(String),

    #[error("time {t} outside trajectory range [0, {t_end}]")]
    OutOfRange { t: f64, t_end: f64 },

    #[error("series needs {needed} echo orders, above the cap of {cap}")]
    Truncation { needed: usize, cap: usize },

    #[error("integration step too coarse: h * max|omega_k - delta| = {0:.4} > 0.5")]
    StepTooCoarse(f64),

    #[error("mode ladder would reach non-positive frequencies (lowest index {lowest})")]
    LadderCrossesZero { lowest: i64 },

    #[error("wavepacket density integrates to {0}, above 1")]
    DensityNotNormalized(f64),

    #[error("optimizer: {0}")]
    Optimization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
