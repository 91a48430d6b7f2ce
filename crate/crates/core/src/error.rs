use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("probability vector is not normalized (sum = {sum})")]
    NotNormalized { sum: f64 },
    #[error("invalid probability: {0}")]
    InvalidProbability(String),
    #[error("empty action space")]
    EmptyActions,
    #[error("signal `{0}` has zero probability mass")]
    ZeroMassSignal(String),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("value of information is zero: no information value to normalize by")]
    ZeroInformationValue,
    #[error("experiment design has no strategies")]
    EmptyDesign,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid problem: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("trial records reference unknown values (trials {})", .ids.join(", "))]
    UnknownTrialValues { ids: Vec<String>, details: Vec<String> },
    #[error("no trial records")]
    NoRecords,
    #[error("marginal check failed: {0}")]
    MarginalCheck(String),
    #[error("payment at baseline is zero, ratio undefined")]
    ZeroBaselinePayment,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
