use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("model too large for exact enumeration: {visible} visible + {hidden} hidden units exceeds {limit}")]
    TooLargeForEnumeration {
        visible: usize,
        hidden: usize,
        limit: usize,
    },

    #[error("invalid probability {value} at index {index}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("state entry {value} at index {index} is not binary")]
    NonBinaryState { index: usize, value: u8 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty batch")]
    EmptyBatch,

    #[error("MIDI: {0}")]
    Midi(String),

    #[error("IDX: {0}")]
    Idx(String),

    #[error("PBM: {0}")]
    Pbm(String),

    #[error("PGM: {0}")]
    Pgm(String),

    #[error("score is not in 4/4 time")]
    NotCommonTime,

    #[error("degenerate input: {0}")]
    Degenerate(String),
}
