use thiserror::Error;

/// Errors raised by the numerical kernel, the state types and the file layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("dimension {requested} exceeds the configured maximum {max} (set QCOH_MAX_DIM to raise it)")]
    SizeLimit { requested: usize, max: usize },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("numerical error: {what} (residual {residual:e})")]
    Numerical { what: String, residual: f64 },

    /// An identity that must hold algebraically was violated; points at a
    /// numerics bug rather than at the input.
    #[error("internal consistency error: {what} (residual {residual:e})")]
    InternalConsistency { what: String, residual: f64 },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for errors caused by the caller's input (bad files, bad
    /// dimensions, invalid states) as opposed to numerical failures.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Dimension(_)
                | Error::SizeLimit { .. }
                | Error::Validation(_)
                | Error::Parse { .. }
                | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
