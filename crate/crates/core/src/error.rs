use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numeric failure in {context}: {detail}")]
    NumericFailure {
        context: &'static str,
        detail: String,
        /// Best available estimate when the routine can produce one.
        best_estimate: Option<f64>,
    },

    #[error("trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn numeric(context: &'static str, detail: impl Into<String>) -> Self {
        Error::NumericFailure {
            context,
            detail: detail.into(),
            best_estimate: None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
