use thiserror::Error;

/// Errors reported by the solver pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate interval [{a}, {b}]: right endpoint must exceed left endpoint")]
    DegenerateInterval { a: f64, b: f64 },

    #[error("invalid discretization: {0}")]
    InvalidDiscretization(String),

    #[error("leading coefficient vanishes at x = {x}")]
    ZeroLeadingCoefficient { x: f64 },

    #[error("dense factorization is singular to working precision (column {column})")]
    SingularDense { column: usize },

    #[error("matching system is singular to working precision (pivot row {row})")]
    SingularMatching { row: usize },

    #[error("boundary functionals are not independent for this operator")]
    DependentBoundaryFunctionals,

    #[error("Newton iteration for Gauss-Legendre node {index} of order {order} did not converge")]
    QuadratureNonConvergence { order: usize, index: usize },

    #[error("point x = {x} lies outside [{a}, {b}]")]
    OutOfRange { x: f64, a: f64, b: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("reference solution vanishes on the evaluation grid")]
    ZeroReference,
}

pub type Result<T> = std::result::Result<T, Error>;
