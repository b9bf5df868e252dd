use thiserror::Error;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Io(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Validation(_) => 2,
            AppError::Budget(_) => 3,
            AppError::Io(_) => 4,
        }
    }
}

impl From<secinvest_core::Error> for AppError {
    fn from(e: secinvest_core::Error) -> Self {
        match e {
            secinvest_core::Error::Budget { .. } => AppError::Budget(e.to_string()),
            other => AppError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e.to_string())
    }
}
