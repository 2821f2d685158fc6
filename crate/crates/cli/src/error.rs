use std::fmt;
use std::path::Path;

use satexplain_core::surrogate::{OracleError, SurrogateError};
use satexplain_core::{DataError, EncodeError, EnumError, ExplainError};

/// A failure, classified by the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or malformed input content.
    Config(String),
    /// Files that cannot be read or written.
    Io(String),
    /// The black box failed or broke its protocol.
    Oracle(String),
    /// Unsatisfiable hard part, solver timeout or verification failure.
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 2,
            CliError::Oracle(_) => 3,
            CliError::Solver(_) => 4,
        }
    }

    pub fn io(path: &Path, e: impl fmt::Display) -> CliError {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            CliError::Config(m) => ("configuration error", m),
            CliError::Io(m) => ("i/o error", m),
            CliError::Oracle(m) => ("oracle error", m),
            CliError::Solver(m) => ("solver error", m),
        };
        write!(f, "{kind}: {msg}")
    }
}

impl std::error::Error for CliError {}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Oracle(e.to_string())
    }
}

impl From<SurrogateError> for CliError {
    fn from(e: SurrogateError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<EnumError> for CliError {
    fn from(e: EnumError) -> Self {
        CliError::Solver(e.to_string())
    }
}

impl From<EncodeError> for CliError {
    fn from(e: EncodeError) -> Self {
        match e {
            EncodeError::ArityMismatch { .. }
            | EncodeError::EmptyInstance
            | EncodeError::Forest(_)
            | EncodeError::Formula(_)
            | EncodeError::NonUnitSoft(_) => CliError::Config(e.to_string()),
            EncodeError::HardUnsat(_) | EncodeError::Sat(_) => CliError::Solver(e.to_string()),
        }
    }
}

impl From<ExplainError> for CliError {
    fn from(e: ExplainError) -> Self {
        match e {
            ExplainError::Encode(e) => e.into(),
            ExplainError::Enumerate(e) => e.into(),
            ExplainError::Forest(e) => e.into(),
        }
    }
}
