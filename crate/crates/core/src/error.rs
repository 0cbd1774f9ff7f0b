use thiserror::Error;

/// Errors raised by operator construction, solvers and trace handling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |H_ij - conj(H_ji)| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Hilbert space dimension {dim} exceeds the limit {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("singular denominator `{denominator}` (value {value:e})")]
    Singular { denominator: &'static str, value: f64 },

    #[error("singular Jacobian at iteration {iteration}")]
    SingularJacobian { iteration: usize },

    #[error("no convergence after {iterations} iterations, residual norm {residual_norm:e} ({reason})")]
    NonConvergence {
        iterations: usize,
        residual_norm: f64,
        residuals: Vec<(String, f64)>,
        reason: String,
    },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("label `{0}` not present in trace")]
    UnknownLabel(String),

    #[error("traces share no labels")]
    NoCommonLabels,

    #[error("trace is not complete: probabilities at t = {time} sum to {sum}")]
    IncompleteTrace { time: f64, sum: f64 },

    #[error("time {time} outside the sampled range [{start}, {end}]")]
    TimeOutOfRange { time: f64, start: f64, end: f64 },

    #[error("minimizer failed to bracket a minimum: {0}")]
    Bracket(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
