use thiserror::Error;

/// Errors produced anywhere in the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid confidence grid: {0}")]
    InvalidGrid(String),

    #[error("invalid accuracy profile: {0}")]
    InvalidProfile(String),

    #[error("invalid arrival weights: {0}")]
    InvalidWeights(String),

    #[error("invalid cost model: {0}")]
    InvalidCost(String),

    #[error("invalid horizon: {0}")]
    InvalidHorizon(String),

    #[error("arrival process incompatible with instance: {0}")]
    ArrivalMismatch(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid bin count {0}: must be at least 1")]
    InvalidBins(i64),

    #[error("trace contains no rows")]
    EmptyTrace,

    #[error("exploration parameter alpha = {0} must be > 0.5")]
    InvalidAlpha(f64),

    #[error("instance has no arrival weights; {0} needs them")]
    MissingWeights(&'static str),

    #[error("policy configuration error: {0}")]
    Config(String),

    #[error("argument out of domain: {0}")]
    Domain(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
