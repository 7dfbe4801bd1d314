//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or analyzing a problem.
#[derive(Debug, Error)]
pub enum Error {
    /// A nonzero vector was required.
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    /// Scaling factors in invariance checks must be nonzero.
    #[error("scale factor must be nonzero")]
    ZeroScale,

    /// A custom coefficient was asked for its gradient but provides none.
    #[error("coefficient function provides no gradient")]
    MissingGradient,

    /// A matrix that must be symmetric deviates too far from its transpose.
    #[error("matrix is not symmetric: relative deviation {deviation:.3e}")]
    NotSymmetric { deviation: f64 },

    /// Vector or matrix dimensions do not match the problem size.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The problem description itself is malformed.
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    /// Perturbation weights are malformed (negative, non-finite, wrong count).
    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    /// A perturbation direction violates its per-term norm budget.
    #[error("direction matrix {term} has norm {norm:.6e} exceeding weight {weight:.6e}")]
    DirectionExceedsBudget { term: usize, norm: f64, weight: f64 },

    /// The supplied lambda is not an eigenvalue of the Jacobian.
    #[error("{lambda} is not an eigenvalue of the Jacobian (nearest real eigenvalue {nearest})")]
    NotAnEigenvalue { lambda: f64, nearest: f64 },

    /// The eigenvalue is repeated or clustered beyond resolution.
    #[error("eigenvalue {lambda} is not simple")]
    NonSimple { lambda: f64 },

    /// The supplied pair does not satisfy the eigenvalue equation.
    #[error("not an eigenpair: residual norm {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotAnEigenpair { residual: f64, tol: f64 },

    /// Relative condition numbers are undefined at a zero eigenvalue.
    #[error("relative condition number is undefined for a zero eigenvalue")]
    ZeroEigenvalue,

    /// The weighted coefficient sum vanished, so backward errors are undefined.
    #[error("weighted coefficient magnitudes sum to zero")]
    DegenerateWeights,

    /// An iterative solver ran out of iterations.
    #[error("no convergence within {iterations} iterations (last backward error {last_eta:.3e})")]
    MaxIterExceeded { iterations: usize, last_eta: f64 },

    /// The augmented Jacobian could not be factored.
    #[error("singular augmented Jacobian at iteration {iteration}")]
    SingularJacobian { iteration: usize },

    /// Monte-Carlo verification needs at least one sample.
    #[error("sample count must be positive")]
    InvalidSamples,

    /// A formula that assumes a symmetric Jacobian was applied to an
    /// unsymmetric one.
    #[error("not applicable: the Jacobian is not symmetric")]
    NotApplicable,

    /// Custom coefficient functions have no file representation.
    #[error("custom coefficient functions cannot be serialized")]
    Unserializable,

    /// File input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
