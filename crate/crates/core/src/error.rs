use thiserror::Error;

/// Errors raised by the estimation, noise and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its admissible domain.
    #[error("parameter `{name}` = {value} out of range: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("index {index} out of range for length {len}")]
    Index { index: usize, len: usize },

    /// An update produced a non-finite coefficient.
    #[error("filter diverged at iteration {iteration}")]
    Divergence { iteration: u64 },

    #[error("invalid configuration: {0}")]
    Invalid(String),

    #[error("unknown algorithm name `{0}`")]
    UnknownAlgorithm(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Parameter {
            name,
            value,
            reason,
        }
    }
}
