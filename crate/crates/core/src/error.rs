use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the distribution kernel, the simulators and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A density vanishes somewhere on (0,1), so divergences against it are undefined.
    #[error("distribution lacks full support on (0,1): {0}")]
    Support(String),

    #[error("adversarial posteriors are two-arm constructions, got {0} arms")]
    AdversaryArms(usize),

    #[error("horizon mismatch: expected {expected}, found {found}")]
    HorizonMismatch { expected: usize, found: usize },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
