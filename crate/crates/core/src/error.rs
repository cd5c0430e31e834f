use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid model parameters or configuration.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A deterministic construction produced an empty cluster.
    #[error("empty cluster: class {0} received no nodes")]
    EmptyCluster(usize),

    /// Shape mismatch between operands.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An exhaustive-enumeration guard was exceeded.
    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),

    /// Two computation routes that must agree did not.
    #[error("internal consistency: {0}")]
    InternalConsistency(String),

    /// Input outside an operation's domain of validity.
    #[error("domain error: {0}")]
    Domain(String),

    /// Serialization or deserialization failure.
    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
