use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("data length {len} does not match {rows}x{cols}")]
    BadLength { rows: usize, cols: usize, len: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("bad shape: {0}")]
    BadShape(String),

    #[error("zero dimension")]
    ZeroDimension,

    #[error("rank deficient: detected rank {rank}, needed {needed}")]
    RankDeficient { rank: usize, needed: usize },

    #[error("iteration cap of {sweeps} sweeps exceeded")]
    ConvergenceFailure { sweeps: usize },

    #[error("pivot block X(:, J) is singular")]
    SingularPivotBlock,

    #[error("skeleton block is singular")]
    SingularSkeleton,

    #[error("sampling distribution is degenerate (all scores below 1e-15)")]
    DegenerateDistribution,

    #[error("column stream ended after {seen} of {expected} columns")]
    StreamExhausted { seen: usize, expected: usize },

    #[error("no tail: k = {k} must be below r = {r}")]
    EmptyTail { k: usize, r: usize },

    #[error("Omega1 does not have full row rank")]
    SingularOmega1,

    #[error("tail sketch lost row rank: r - k = {tail} < l = {l} or numerically singular")]
    TailRankDeficient { tail: usize, l: usize },

    #[error("q = {q} outside the admissible range 0..={max}")]
    InadmissibleQ { q: usize, max: usize },

    #[error("sparse factor {index} stayed all-zero after {retries} retries")]
    EmptyFactor { index: usize, retries: usize },

    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },

    #[error("non-numeric cell {text:?} at row {row}, column {col}")]
    NonNumericCell { row: usize, col: usize, text: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
