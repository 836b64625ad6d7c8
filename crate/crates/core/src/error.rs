use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("series too short: need at least {need}, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("malformed row {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("duplicate timestamp {0}")]
    DuplicateTimestamp(String),
    #[error("gap before {0} not allowed under policy=error")]
    Gap(String),
    #[error("non-positive price {value} at {timestamp}")]
    NonPositivePrice { timestamp: String, value: f64 },
    #[error("non-stationary parameters: {0}")]
    NonStationary(String),
    #[error("inapplicable: {0}")]
    Inapplicable(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn need(got: usize, need: usize) -> Result<()> {
    if got < need {
        Err(Error::TooShort { need, got })
    } else {
        Ok(())
    }
}
