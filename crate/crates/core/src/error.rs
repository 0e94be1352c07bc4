use thiserror::Error;

/// Errors produced by the sensing chain.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid radar configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error(
        "beat frequency {beat_hz:.1} Hz of object at {range_m} m exceeds the ADC Nyquist limit {nyquist_hz:.1} Hz"
    )]
    BeatAboveNyquist {
        range_m: f64,
        beat_hz: f64,
        nyquist_hz: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },

    #[error("range {0} m outside the unambiguous interval")]
    RangeOutOfBounds(f64),

    #[error("matrix is singular or not positive definite")]
    Singular,

    #[error("input signal is identically zero")]
    ZeroSignal,

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("angle window lies outside the heatmap")]
    EmptyWindow,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
