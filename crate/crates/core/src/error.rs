use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter for {family}: {constraint}")]
    InvalidDistribution { family: &'static str, constraint: String },

    #[error("{name} out of range: {message}")]
    OutOfRange { name: &'static str, message: String },

    #[error("non-positive entry {value} at index {index} (1-based)")]
    NonPositive { index: usize, value: f64 },

    #[error("grid function: {0}")]
    Grid(String),

    #[error("empty sample")]
    EmptySample,

    #[error("singular normal system; use a positive ridge ({0})")]
    SingularSystem(String),

    #[error("replication {index} failed: {source}")]
    Replication { index: u64, source: Box<Error> },

    #[error("configuration: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn out_of_range(name: &'static str, message: impl Into<String>) -> Error {
    Error::OutOfRange {
        name,
        message: message.into(),
    }
}
