use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge {index} ({src}, {dst}) has an endpoint outside [0, {num_nodes})")]
    EdgeOutOfRange {
        index: usize,
        src: u64,
        dst: u64,
        num_nodes: usize,
    },

    #[error("{context}: bad magic (expected {expected:?}, found {found:?})")]
    BadMagic {
        context: &'static str,
        expected: [u8; 4],
        found: [u8; 4],
    },

    #[error("{context}: unsupported version {found} (expected {expected})")]
    VersionMismatch {
        context: &'static str,
        expected: u32,
        found: u32,
    },

    #[error("{context}: file truncated")]
    Truncated { context: &'static str },

    #[error("{context}: malformed content: {detail}")]
    Malformed {
        context: &'static str,
        detail: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("output buffer too small: need {needed} values, have {available}")]
    Capacity { needed: usize, available: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("trace was recorded on a different graph (checksum {expected:#018x}, graph has {found:#018x})")]
    ChecksumMismatch { expected: u64, found: u64 },

    #[error("variant {variant} produced digest {found} but baseline produced {expected}")]
    DigestMismatch {
        variant: String,
        expected: String,
        found: String,
    },

    #[error("batch preparation worker failed: {0}")]
    WorkerPanic(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Stream(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by file contents or the file system.
    pub fn is_io_or_format(&self) -> bool {
        matches!(
            self,
            Error::BadMagic { .. }
                | Error::VersionMismatch { .. }
                | Error::Truncated { .. }
                | Error::Malformed { .. }
                | Error::Io { .. }
                | Error::Stream(_)
                | Error::Csv(_)
                | Error::Json(_)
                | Error::ChecksumMismatch { .. }
        )
    }
}
