use alloc::string::String;

/// Error categories. The CLI maps `Dimension`, `Config`, `Data`,
/// `Unsupported` and `TableMiss` to the data/config exit code and
/// `Conditioning`/`Numerical` to the numerical one.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("conditioning event has zero probability: {0}")]
    Conditioning(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("explainer table has no entry for {0}")]
    TableMiss(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    /// True for errors that stem from numerics rather than inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Conditioning(_) | Error::Numerical(_))
    }
}
