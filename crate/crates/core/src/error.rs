use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input shape mismatch: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical underflow: {0}")]
    Underflow(String),

    #[error("reference comparison failed: {0}")]
    Mismatch(String),

    #[error("training diverged at step {step}: loss is {loss}")]
    Divergence { step: usize, loss: f64 },

    #[error("{path}: {source}")]
    Indexed {
        path: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input or configuration).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Underflow(_) | Error::Mismatch(_) | Error::Divergence { .. } => true,
            Error::Indexed { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn at(self, path: impl Into<String>) -> Error {
        Error::Indexed {
            path: path.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Shape(msg()))
    }
}
