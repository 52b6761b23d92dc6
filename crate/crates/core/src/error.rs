use thiserror::Error;

use crate::expr::{EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("field evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("non-finite value {value} at {location}")]
    NonFinite { location: String, value: f64 },
    #[error("sigma is not positive definite at t = {t}, x = {x:?}")]
    NotPositiveDefinite { t: f64, x: Vec<f64> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{quantity} has no closed form for {entry}")]
    Unavailable { entry: String, quantity: String },
    #[error("mean-curvature time check failed: {0}")]
    CmcVerification(String),
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
