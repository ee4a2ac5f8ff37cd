use thiserror::Error;

use crate::model::Timestamp;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: duplicate entry for network {network} at time {time}")]
    DuplicateEntry {
        line: usize,
        time: Timestamp,
        network: String,
    },

    #[error("input contains no data rows")]
    EmptyInput,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("total weight of the network universe is zero")]
    ZeroWeight,

    #[error("undefined range: {0}")]
    UndefinedRange(String),

    #[error("no latency samples")]
    NoSamples,

    #[error("network universes differ: {0}")]
    UniverseMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::Config(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
