use thiserror::Error;

/// Crate-wide error type. The CLI maps variants onto exit codes:
/// config errors -> 2, numerical aborts -> 3, I/O and format errors -> 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration invalid:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("numerical abort: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("bad file format: {0}")]
    Format(String),

    #[error("diagnostic input invalid: {0}")]
    Diagnostic(String),
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Exit code for the CLI surface.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Dimension(_) => 2,
            Error::Numerical(_) | Error::Diagnostic(_) | Error::GridMismatch(_) => 3,
            Error::Io { .. } | Error::Format(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
