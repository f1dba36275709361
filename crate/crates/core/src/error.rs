use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter or configuration field is out of range. `field` names it.
    #[error("invalid `{field}`: {message}")]
    Config { field: String, message: String },

    /// The requested analytic quantity does not exist for these parameters
    /// (e.g. edge states of a chain in the trivial phase).
    #[error("outside the domain: {0}")]
    Domain(String),

    /// A state vector handed in by the caller violates a precondition.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("degenerate levels: gap {gap:e} below threshold {threshold:e}")]
    Degenerate { gap: f64, threshold: f64 },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. })
    }
}
