use std::fmt;
use std::path::Path;

use tourcast::Error as CoreError;

/// A failure with the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad input files, manifest, flags or output location (exit 2).
    Input(String),
    /// No initial tour fits the calendar (exit 3).
    Construction(String),
    /// The oracle would enumerate more tours than allowed (exit 4).
    OracleCap(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Construction(_) => 3,
            CliError::OracleCap(_) => 4,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub(crate) fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Construction(m) => write!(f, "construction failed: {m}"),
            CliError::OracleCap(m) => write!(f, "oracle refused: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::PlacementOverflow { .. } => CliError::Construction(e.to_string()),
            CoreError::EnumerationCap { .. } => {
                CliError::OracleCap(format!("{e}; set TOURCAST_CAP to raise the limit"))
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
