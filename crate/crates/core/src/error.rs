use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid composition spec n={n}, m={m}: {reason}")]
    InvalidSpec {
        n: usize,
        m: usize,
        reason: &'static str,
    },

    #[error("composition count for n={n}, m={m} exceeds the 128-bit integer range")]
    CountOverflow { n: usize, m: usize },

    #[error("length mismatch: '{id_a}' has {len_a} observations, '{id_b}' has {len_b}")]
    LengthMismatch {
        id_a: String,
        len_a: usize,
        id_b: String,
        len_b: usize,
    },

    #[error("composition {composition} does not partition a series of length {n}")]
    CompositionMismatch { composition: String, n: usize },

    #[error("segment (start={start}, length={length}) is outside the table (n={n}, m={m})")]
    SegmentOutOfRange {
        start: usize,
        length: usize,
        n: usize,
        m: usize,
    },

    #[error("series '{id}' is invalid: {reason}")]
    InvalidSeries { id: String, reason: String },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("unknown series id '{0}'")]
    UnknownId(String),

    #[error("series have mixed lengths: '{id}' has {len} observations, expected {expected}")]
    MixedLengths {
        id: String,
        len: usize,
        expected: usize,
    },

    #[error("invalid job configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid filter expression '{expr}': {reason}")]
    InvalidFilter { expr: String, reason: String },

    #[error("invalid synthetic spec: {0}")]
    InvalidSynth(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("no valid rows in input")]
    EmptyDataset,

    #[error("duplicate series ids: {}", .0.join(", "))]
    DuplicateIds(Vec<String>),

    #[error("output sink failed after {written} records: {source}")]
    Sink {
        written: u64,
        #[source]
        source: std::io::Error,
    },

    #[error("job cancelled")]
    Cancelled,
}

pub type Result<T> = std::result::Result<T, Error>;
