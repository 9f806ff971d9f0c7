use std::io;
use std::path::PathBuf;

use serde::Serialize;
use stripex_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Serialize)]
struct ErrorLine<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Parse { path: path.into(), message: message.to_string() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(CoreError::Numerical(_)) => "numerical",
            CliError::Core(CoreError::Conditioning(_)) => "conditioning",
            CliError::Core(CoreError::Config(_)) => "config",
            CliError::Core(_) => "data",
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
        }
    }

    /// 2 usage, 3 data or config, 4 numerical or conditioning.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(CoreError::Numerical(_) | CoreError::Conditioning(_)) => 4,
            _ => 3,
        }
    }

    /// Single-line JSON for the error stream.
    pub fn to_json_line(&self) -> String {
        let line = ErrorLine { error: self.kind(), message: self.to_string(), exit_code: self.exit_code() };
        serde_json::to_string(&line).expect("error line serializes")
    }
}
