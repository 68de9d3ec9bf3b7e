use std::path::PathBuf;

/// Failures that stop a command before it produces a report. All of them map
/// to exit status 1; a report whose checks fail is not an error.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] hypercurv_core::Error),
    #[error("{origin}: invalid JSON at line {line}, column {column}: {message}")]
    Json { origin: String, line: usize, column: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("output: {0}")]
    Output(String),
    #[error("shape process: {0}")]
    Subprocess(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn json(origin: impl Into<String>, err: &serde_json::Error) -> Self {
        let mut message = err.to_string();
        if let Some(at) = message.rfind(" at line ") {
            message.truncate(at);
        }
        CliError::Json { origin: origin.into(), line: err.line(), column: err.column(), message }
    }
}

pub type CliResult<T> = Result<T, CliError>;
