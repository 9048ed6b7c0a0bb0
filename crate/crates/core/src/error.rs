use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by corpus ingestion, metric computation, and report emission.
#[derive(Debug, Error)]
pub enum Error {
    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("cannot read '{path}': {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid UTF-8 in '{path}' at byte offset {offset}")]
    Utf8 { path: PathBuf, offset: u64 },

    #[error("empty corpus for language '{language}'")]
    EmptyCorpus { language: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("empty series")]
    EmptySeries,

    #[error("no complete segments (series length {len} < block length {block_len})")]
    NoCompleteSegments { len: usize, block_len: usize },

    #[error("empty frequency table")]
    EmptyTable,

    #[error("gram order {n} exceeds segment length {len}")]
    OrderTooLarge { n: usize, len: usize },

    #[error("kernel density estimation needs at least 2 samples, got {got}")]
    TooFewSamples { got: usize },

    #[error("zero bandwidth: all {got} samples are identical")]
    ZeroBandwidth { got: usize },

    #[error("report error: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, Error>;
