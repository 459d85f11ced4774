use alloc::string::String;

/// Errors reported by the numerical kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("gamma function is not defined for argument {0} (expected z > 0)")]
    GammaDomain(f64),
    #[error("grid needs at least 2 subintervals, got {0}")]
    GridTooSmall(usize),
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("fractional order {0} must be positive and finite")]
    InvalidOrder(f64),
    #[error("{op} requires order in {range}, got {order}")]
    OrderOutOfRange {
        op: &'static str,
        range: &'static str,
        order: f64,
    },
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite sample at node {0}")]
    NonFinite(usize),
    #[error("sampled functions live on different grids")]
    GridMismatch,
    #[error("problem is not admissible: {0}")]
    Inadmissible(String),
    #[error("assembled form has a non-finite entry at ({0}, {1})")]
    NonFiniteForm(usize, usize),
    #[error(
        "Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("isoperimetric value {0} is not positive; candidate is degenerate")]
    DegenerateCandidate(f64),
    #[error("index {index} out of range 1..={available}")]
    IndexOutOfRange { index: usize, available: usize },
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("coefficient table does not cover x = {0}")]
    OutsideTable(f64),
}

pub type Result<T> = core::result::Result<T, Error>;
