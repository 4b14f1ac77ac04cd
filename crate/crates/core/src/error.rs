use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric input fell outside the supported range (sieve limits,
    /// queries past the end of a table, primorial overflow).
    #[error("{what} = {value} is out of range: {reason}")]
    Range {
        what: &'static str,
        value: u64,
        reason: String,
    },

    /// An argument violated a precondition (composite where a prime is
    /// required, ordering violations, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Materialising a wheel would exceed the configured level cap.
    #[error(
        "wheel level {level} exceeds the materialisation cap {cap} (raise the cap explicitly)"
    )]
    Resource { level: u64, cap: u64 },

    /// A numeric computation had no meaningful result.
    #[error("computation error: {0}")]
    Computation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn range(what: &'static str, value: u64, reason: impl Into<String>) -> Self {
        Error::Range {
            what,
            value,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
