use thiserror::Error;

/// Anything that ends a run early, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] psmdi::Error),

    #[error("{0}")]
    NoResult(String),

    #[error("{failed} of {total} validation points failed")]
    ValidationFailed { failed: usize, total: usize },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
            CliError::Model(e) if e.is_no_result() => 3,
            CliError::Model(psmdi::Error::UnknownParameter(_) | psmdi::Error::InvalidStudy(_)) => 1,
            CliError::Model(_) | CliError::ValidationFailed { .. } => 2,
            CliError::NoResult(_) => 3,
        }
    }
}
