use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {op} got {left:?} and {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("vector of length {len} cannot be reshaped to {n}x{n}")]
    BadVecLength { len: usize, n: usize },
    #[error("{what} is not hermitian (max |A - A†| = {deviation:e})")]
    NotHermitian { what: String, deviation: f64 },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("eigenvalue iteration did not converge after {iterations} iterations ({found} of {n} eigenvalues found)")]
    NoConvergence {
        iterations: usize,
        found: usize,
        n: usize,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("design matrix is rank deficient: achieved rank {achieved}, need {required}")]
    RankDeficient { achieved: usize, required: usize },
    #[error("observable search exhausted {attempts} attempts; best achieved rank {best_rank} of {required}")]
    SearchExhausted {
        attempts: usize,
        best_rank: usize,
        required: usize,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
