use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precision ceiling exceeded: {0}")]
    PrecisionCeiling(String),
    #[error("no embedding of the {order}-th roots of unity into the ring for p = {p} (f = {f}, wild level {wild_level})")]
    EmbeddingUnavailable {
        order: u64,
        p: u64,
        f: usize,
        wild_level: u32,
    },
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("route infeasible: {0}")]
    RouteInfeasible(String),
    #[error("inconsistency: {0}")]
    Inconsistency(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit code for command-line front ends.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Io(_) => 1,
            Error::Inconsistency(_) => 2,
            Error::PrecisionCeiling(_) | Error::Precision(_) => 3,
            Error::EmbeddingUnavailable { .. } | Error::RouteInfeasible(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
