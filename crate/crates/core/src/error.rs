use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A Bloch vector too far from unit norm, or otherwise not a pure state.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Amplitudes not normalised, a vanishing amplitude, or mismatched lengths.
    #[error("invalid interferometer spec: {0}")]
    InvalidSpec(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("index error: {0}")]
    Index(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("estimation failed: {0}")]
    Estimation(String),
}
