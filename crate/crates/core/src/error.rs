use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two operands are not compatible (different group types, lattice shapes...).
    #[error("structural mismatch: {0}")]
    Structural(String),
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An enumeration or series would exceed the configured cap.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// A run configuration is invalid.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
