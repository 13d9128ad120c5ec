use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("no finite exponential moment found: E[exp(a d)] exceeds the target for every tested rate")]
    NoFiniteExponentialMoment,

    #[error("path grid too small: {0} points, need at least 2")]
    GridTooSmall(usize),

    #[error("transport solver failure: {0}")]
    SolverFailure(String),

    #[error("reference cdf is not monotone near x = {x}")]
    NonMonotoneCdf { x: f64 },

    #[error("potential is not 1-Lipschitz: |f(x) - f(y)| = {diff} > d(x, y) = {dist}")]
    NotLipschitz { diff: f64, dist: f64 },

    #[error("potential has no value at support point {0:?}")]
    MissingPotential(Vec<f64>),

    #[error("measures do not share the same support list")]
    SupportMismatch,

    #[error("conjugate is unbounded at s = {s}: rate function grows at most linearly")]
    Unbounded { s: f64 },

    #[error("contraction coefficient r = {0} outside [0, 1)")]
    ContractionOutOfRange(f64),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error("quantization witness too far: W1 = {achieved} > t/4 = {allowed}")]
    WitnessTooFar { achieved: f64, allowed: f64 },

    #[error("ball intersection graph on {centers} cover centers is disconnected")]
    DisconnectedGraph { centers: usize },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
