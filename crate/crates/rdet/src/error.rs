use std::path::PathBuf;

/// Exit status for a run that completed and passed every certified check.
pub const EXIT_PASS: i32 = 0;
/// A certified bound or validator check failed.
pub const EXIT_BOUND_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] rdet_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("budget: {0}")]
    Budget(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget(_) | Error::Core(rdet_core::Error::Budget(_) | rdet_core::Error::DepthCap { .. }) => {
                EXIT_BUDGET
            }
            Error::Usage(_)
            | Error::Core(
                rdet_core::Error::Parameter(_)
                | rdet_core::Error::InvalidFraction(_)
                | rdet_core::Error::InvalidDigit(_)
                | rdet_core::Error::InvalidInterval { .. }
                | rdet_core::Error::WordTooLong { .. }
                | rdet_core::Error::Domain(_),
            ) => EXIT_USAGE,
            _ => EXIT_BOUND_FAILURE,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
