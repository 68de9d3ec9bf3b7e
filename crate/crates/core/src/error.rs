use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("mixed numeric regimes: {0}")]
    MixedRegime(String),

    #[error("cannot parse `{input}` as a rational number")]
    Parse { input: String },

    #[error("singular patch: {0}")]
    SingularPatch(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("embedding callback failed: {0}")]
    Callback(String),

    #[error("no certificate registered for this system: {0}")]
    UnsupportedCase(String),

    #[error("closed form mismatch: {0}")]
    InvariantMismatch(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
