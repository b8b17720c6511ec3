use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] hyrep_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    /// A check ran and did not meet its threshold.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 1 for validation failures, 2 for usage and configuration problems.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) | CliError::Pool(_) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
