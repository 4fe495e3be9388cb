use std::io;

use thiserror::Error;

use crate::layout::ChunkId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A code or configuration parameter violates its constraints.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Buffers disagree in length, or do not match the layout they claim.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Not enough live nodes or shards to recover the data.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A look-up repair could not read one of its helper chunks.
    #[error("repair failed: helper chunk {missing} on node {node} is unavailable")]
    RepairFailed { missing: ChunkId, node: usize },

    /// A checksum or digest did not match.
    #[error("integrity check failed: {0}")]
    Integrity(String),

    /// The cluster has too few machines to place a redundancy set.
    #[error("placement infeasible: {0}")]
    Placement(String),

    /// A shard, manifest or config file could not be parsed.
    #[error("malformed {what}: {reason}")]
    Format { what: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
