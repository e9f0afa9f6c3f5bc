use thiserror::Error;

/// Errors raised by schedule construction, protocol evaluation, the analytic
/// bounds and the command-line front end.
#[derive(Debug, Error)]
pub enum ContentionError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid arguments: {0}")]
    InvalidArguments(String),

    #[error("slot {t} lies beyond the schedule horizon (last non-trivial time {covered})")]
    HorizonExceeded { t: u64, covered: String },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("divergent series: {0}")]
    DivergentSeries(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("no finite truncation exists: {0}")]
    NoFiniteTruncation(String),

    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("divergence: {0}")]
    Divergence(String),

    #[error("infeasible parameters, violated: {}", .violated.join("; "))]
    Infeasible { violated: Vec<String> },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = ContentionError> = std::result::Result<T, E>;
