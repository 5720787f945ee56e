use std::path::PathBuf;

use crate::solver::ValidationOutcome;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid penalty: a = {a} with threshold λ = {lambda} (need a ≥ 0 and a·λ < 1)")]
    InvalidPenalty { a: f64, lambda: f64 },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("singular value decomposition failed to converge")]
    DecompositionFailure,

    #[error("solver configuration rejected: {0}")]
    ConfigRejected(ValidationOutcome),

    #[error("non-finite iterate at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("degenerate regularization weight: {0} is zero")]
    DegenerateLambda(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rank {rank} outside 1..=min({m}, {n})")]
    BadRank { rank: usize, m: usize, n: usize },

    #[error("reference has zero norm")]
    ZeroReference,

    #[error("bad transform parameters: {0}")]
    BadParams(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("ragged rows: line {line} has {found} fields, expected {expected}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("wav: {0}")]
    Wav(#[from] hound::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
