use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] cardvote_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    /// Malformed profile or table file.
    #[error("format: {0}")]
    Format(String),
    /// Input data unusable for the requested analysis.
    #[error("data: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;
