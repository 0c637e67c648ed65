use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = QslError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum QslError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: |H - H^dagger| = {deviation:e} at ({row}, {col})")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 2, found {0}")]
    InvalidDimension(usize),

    #[error("state is not normalized: norm^2 = {0}")]
    NotNormalized(f64),

    #[error("{what} must lie in {range}, got {value}")]
    OutOfRange {
        what: &'static str,
        range: &'static str,
        value: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state has zero energy spread and never evolves")]
    ZeroSpread,

    #[error("target angle {target} not reached within t_max = {t_max}")]
    NotReached { target: f64, t_max: f64 },

    #[error("tangency at x* = {x_star} with a = {a} gives non-positive slope b = {b}")]
    NonPositiveSlope { x_star: f64, a: f64, b: f64 },

    #[error("gate cannot be realized: {0}")]
    Unrealizable(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl QslError {
    pub(crate) fn theta_range(value: f64) -> Self {
        QslError::OutOfRange {
            what: "theta",
            range: "[0, pi/2]",
            value,
        }
    }

    /// True for errors caused by reading or parsing files.
    pub fn is_file_error(&self) -> bool {
        matches!(self, QslError::Io { .. } | QslError::Parse { .. })
    }
}
