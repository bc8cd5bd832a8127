use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero has no multiplicative inverse in GF(256)")]
    ZeroInverse,

    #[error("polynomial {0:#x} is not primitive over GF(2) with degree 8")]
    NotPrimitive(u16),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("code construction failed: {0}")]
    Construction(String),

    #[error("parity-check matrix is rank deficient (rank {rank} < {rows} rows)")]
    RankDeficient { rank: usize, rows: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("matrix is numerically singular: {0}")]
    Singular(String),

    #[error("failed to parse code file at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
