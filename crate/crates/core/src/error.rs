use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate scenario: {0}")]
    DegenerateScenario(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 config error, 3 degenerate
    /// scenario, 4 I/O error, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidInput(_) => 2,
            Error::DegenerateScenario(_) => 3,
            Error::Io(_) => 4,
            _ => 1,
        }
    }
}
