use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Structurally invalid arguments (mismatched grids, p > q, ...).
    #[error("argument error: {0}")]
    Argument(String),
    /// The distribution does not carry the structural property a bound needs.
    #[error("contract error: {0}")]
    Contract(String),
    /// A numerical procedure did not reach its tolerance.
    #[error("accuracy error: {message} (estimate {estimate}, error bound {error_bound})")]
    Accuracy {
        message: String,
        estimate: f64,
        error_bound: f64,
    },
    /// Requested value lies outside what a sweep produced.
    #[error("range error: {0}")]
    Range(String),
    #[error("parse error: {0}")]
    Parse(String),
    /// Internal consistency check failed.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn accuracy(message: impl Into<String>, estimate: f64, error_bound: f64) -> Self {
        Error::Accuracy {
            message: message.into(),
            estimate,
            error_bound,
        }
    }
}
