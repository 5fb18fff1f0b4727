use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("capability not enabled: {0}")]
    Capability(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("table integrity: {0}")]
    TableIntegrity(String),
    #[error("readiness violation: {0}")]
    Readiness(String),
    #[error("invalid counterexample: {0}")]
    InvalidCounterexample(String),
    #[error("budget exhausted after {} iterations ({reason})", stats.iterations)]
    Budget {
        reason: String,
        stats: Box<crate::learner::LearnerStats>,
    },
    #[error("external solver: {0}")]
    Solver(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
