//! Condition numbers and backward errors for eigenvector-nonlinear
//! eigenvalue problems in sum-of-products form.
//!
//! The problems treated here look like `A(v) v = lambda v` where the matrix
//! itself depends on the eigenvector,
//!
//! ```text
//! A(v) = f_1(v) A_1 + ... + f_m(v) A_m ,
//! ```
//!
//! with symmetric `A_i` and scalar coefficients `f_i` that do not change when
//! `v` is rescaled. The crate provides, for such problems:
//!
//! * first-order perturbation theory at a simple eigenpair: sensitivities,
//!   worst-case (condition) numbers for the eigenvalue and the eigenvector
//!   under arbitrary or symmetry-structured term perturbations in the
//!   spectral or Frobenius norm, and perturbation directions that attain the
//!   worst case ([`conditioning`]);
//! * backward errors of approximate eigenpairs in the same perturbation
//!   model, with attaining perturbations and the Rayleigh-quotient choice of
//!   `lambda` that minimizes them ([`backward_error`]);
//! * solvers: Newton on the augmented system, a self-consistent-field
//!   iteration, warm-started resolves of perturbed problems, and
//!   pseudo-arclength-free branch continuation in an external parameter with
//!   turning-point detection ([`solvers`], [`continuation`]);
//! * two study families exercising everything above, a scaled Wilkinson
//!   construction with tunably ill-conditioned eigenvalues and a two-term
//!   family whose branches collide and fold, plus a Monte-Carlo check that
//!   sampled perturbations never beat the predicted worst case
//!   ([`experiments`]);
//! * plain-text I/O for problems, vectors, and sweep results ([`io`]).
//!
//! Dense `nalgebra` types are used throughout; problems of a few hundred
//! unknowns are the intended scale.

pub mod backward_error;
pub mod coefficient;
pub mod conditioning;
pub mod continuation;
pub mod error;
pub mod experiments;
pub mod io;
pub mod linalg;
pub mod problem;
pub mod solvers;
pub mod spectral;

pub use coefficient::Coefficient;
pub use error::{Error, Result};
pub use linalg::MatrixNorm;
pub use problem::{Eigenpair, ScalingCheck, SpmfProblem, Term, WeightPolicy};
