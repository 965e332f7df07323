//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its documented range or an enum precondition.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An input value or shape is outside an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Dataset ingestion or serialization failed.
    #[error("data error: {0}")]
    Data(String),

    /// A retry or iteration budget was exhausted.
    #[error("resource limit: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
