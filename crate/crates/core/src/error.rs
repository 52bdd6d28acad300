use thiserror::Error;

/// Errors reported by the stream model, the sketches and the cover algorithm.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid vertex pair ({u}, {v}) for n = {n}")]
    InvalidVertex { u: usize, v: usize, n: usize },

    #[error("edge index {index} out of range for n = {n}")]
    EdgeOutOfRange { index: u64, n: usize },

    #[error("update {position}: {kind}")]
    InvalidStream { position: usize, kind: StreamErrorKind },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hash domain {domain} exceeds the field size")]
    DomainTooLarge { domain: u64 },

    #[error("value {value} outside hash domain {domain}")]
    OutOfDomain { value: u64, domain: u64 },

    #[error("partition retry budget ({attempts} draws) exhausted")]
    PartitionRetriesExhausted { attempts: u32 },

    #[error("cannot merge sketches: {0}")]
    ShapeMismatch(String),

    #[error("corrupt sketch blob: {0}")]
    Codec(String),

    #[error("instance too large for exact search: {0}")]
    TooLarge(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("run failed: {0}")]
    RunFailed(String),
}

/// Why a stream update was rejected by validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamErrorKind {
    DeleteBeforeInsert,
    DuplicateInsert,
    IndexOutOfRange,
}

impl std::fmt::Display for StreamErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StreamErrorKind::DeleteBeforeInsert => "delete of an absent edge",
            StreamErrorKind::DuplicateInsert => "insert of a present edge",
            StreamErrorKind::IndexOutOfRange => "edge index out of range",
        };
        f.write_str(s)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
