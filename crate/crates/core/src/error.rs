use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum QeError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, QeError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(QeError::InvalidParams(msg.into()))
}
