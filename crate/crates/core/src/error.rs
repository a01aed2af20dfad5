use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the comb, graph, Gaussian and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("top and right sides differ in length ({top} vs {right})")]
    UnequalSides { top: usize, right: usize },
    #[error("empty Hankel vector")]
    EmptyVector,
    #[error("Hankel entries must be finite")]
    NonFinite,
    #[error("skew-diagonal {diagonal} is not constant (max deviation {deviation:e})")]
    NotHankel { diagonal: usize, deviation: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("{what} is not symmetric: entry ({row},{col}) deviates by {deviation:e}")]
    NotSymmetric {
        what: &'static str,
        row: usize,
        col: usize,
        deviation: f64,
    },
    #[error("{0} is not positive definite")]
    NotPositiveDefinite(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cluster adjacency has nonzero diagonal entry {value:e} at {index}")]
    NonzeroDiagonal { index: usize, value: f64 },
    #[error("invalid comb: {0}")]
    InvalidComb(String),
    #[error("invalid pump: {0}")]
    InvalidPump(String),
    #[error("pump with mode-index sum {freq_sum} couples no in-window mode pair")]
    PumpOutOfWindow { freq_sum: u32 },
    #[error("mode index {index} out of range for {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },
    #[error("quadrature combination has no nonzero coefficient")]
    ZeroCombination,
    #[error("squeezing parameter must be finite and non-negative, got {0}")]
    InvalidSqueezing(f64),
    #[error("measuring Q of mode {mode} is singular (variance {variance:e})")]
    SingularMeasurement { mode: usize, variance: f64 },
    #[error("renumbering search limited to {cap} vertices, got {size}")]
    SizeTooLarge { size: usize, cap: usize },
    #[error("expected {expected} connected components, found {actual}")]
    WrongComponentCount { expected: usize, actual: usize },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
