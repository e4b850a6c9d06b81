use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate system label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown system label `{0}`")]
    UnknownLabel(String),
    #[error("label list is not a permutation of the layout: {0}")]
    NotPermutation(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("map is not completely positive (min eigenvalue {0:e})")]
    NotCp(f64),
    #[error("map is not trace preserving (deviation {0:e})")]
    NotTp(f64),
    #[error("unsupported slot count k = {0}")]
    UnsupportedK(usize),
    #[error("basis rank {rank} differs from expected span dimension {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("basis and scenario do not match: {0}")]
    BasisMismatch(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("certificate construction failed: {0}")]
    Certification(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
