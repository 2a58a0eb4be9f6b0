use std::fmt;

use ricci_core::Error as CoreError;

/// CLI failure with an exit-code mapping: 2 for usage and parameter
/// problems, 3 for file trouble, 4 for numerical breakdown (a kernel row
/// with no usable mass, or a search that ran past its cap).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(std::io::Error),
    Core(CoreError),
    /// A per-query failure, tagged with the query's position so the caller
    /// can tell which input broke.
    QueryFailed { index: usize, source: CoreError },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Core(e) | CliError::QueryFailed { source: e, .. } => match e {
                CoreError::Io(_) | CoreError::MalformedFile { .. } => 3,
                CoreError::BandwidthTooSmall { .. } | CoreError::NotAttainable(_) => 4,
                _ => 2,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::QueryFailed { index, source } => {
                write!(f, "query {index}: {source}")
            }
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
