//! Backward errors of approximate eigenpairs, and perturbations realizing
//! them.
//!
//! For an approximate pair `(lambda, v)` with residual `r = A(v) v - lambda
//! v`, the backward error is the smallest `eps` such that perturbed term
//! matrices `A_i + D_i` with `||D_i|| <= eps w_i` make the pair exact. With
//! `alpha = sum_i |f_i(v)| w_i`:
//!
//! ```text
//! eta        = ||r|| / (alpha ||v||)
//! eta_sym_2  = eta
//! eta_sym_F  = gamma eta ,   gamma = sqrt(1 + sin^2 t) ,
//! ```
//!
//! where `t` is the angle between `r` and `v`. Restricting to symmetric
//! perturbations is free in the spectral norm and costs at most `sqrt(2)` in
//! the Frobenius norm. Every case is attained by an explicit rank-one or
//! rank-two perturbation built from `r` and `v`, returned together with its
//! size as an [`AttainingPerturbation`].
//!
//! Over all choices of `lambda` at fixed `v`, the Rayleigh quotient
//! `v^T A(v) v / v^T v` minimizes the backward error, which gives a backward
//! error of the vector alone.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::conditioning::PerturbationDirection;
use crate::error::{Error, Result};
use crate::linalg::{self, MatrixNorm};
use crate::problem::SpmfProblem;
use crate::spectral;

/// Denominators `alpha ||v||` at or below this are reported as degenerate.
pub const DEGENERATE_SCALE_FLOOR: f64 = 1e-300;

/// The admissible perturbation classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PerturbationClass {
    /// Arbitrary matrices; the same backward error in either norm.
    Arbitrary,
    /// Symmetric matrices, budget in the spectral norm.
    SymmetricSpectral,
    /// Symmetric matrices, budget in the Frobenius norm.
    SymmetricFrobenius,
}

/// A perturbation size together with the unit-budget direction realizing it:
/// replacing each `A_i` by `A_i + epsilon E_i` makes the pair exact.
#[derive(Debug, Clone)]
pub struct AttainingPerturbation {
    /// The backward error of the class, `||D_i|| = epsilon w_i`.
    pub epsilon: f64,
    /// The direction matrices `E_i`, with `||E_i|| = w_i`.
    pub direction: PerturbationDirection,
}

/// Everything the formulas need at one approximate pair.
struct ResidualContext {
    v: DVector<f64>,
    r: DVector<f64>,
    f: Vec<f64>,
    eta: f64,
    gamma: f64,
}

fn residual_context(problem: &SpmfProblem, lambda: f64, v: &DVector<f64>) -> Result<ResidualContext> {
    let f = problem.coefficient_values(v)?;
    let alpha: f64 = f
        .iter()
        .zip(problem.weights())
        .map(|(fi, wi)| fi.abs() * wi)
        .sum();
    let denom = alpha * v.norm();
    if denom <= DEGENERATE_SCALE_FLOOR {
        return Err(Error::DegenerateWeights);
    }
    let r = spectral::residual(problem, lambda, v)?;
    let eta = r.norm() / denom;
    let gamma = if r.norm() == 0.0 {
        1.0
    } else {
        let cos = linalg::cosine(&r, v)?;
        (2.0 - cos * cos).sqrt()
    };
    Ok(ResidualContext {
        v: v.clone(),
        r,
        f,
        eta,
        gamma,
    })
}

/// Backward error of `(lambda, v)` under arbitrary perturbations. The same
/// value is attained in the spectral and the Frobenius norm, and it is
/// invariant under rescaling of `v`.
pub fn backward_error(problem: &SpmfProblem, lambda: f64, v: &DVector<f64>) -> Result<f64> {
    Ok(residual_context(problem, lambda, v)?.eta)
}

/// Backward errors under symmetric perturbations, as `(spectral,
/// frobenius)`. The spectral value coincides with the unstructured backward
/// error; the Frobenius value is larger by `gamma in [1, sqrt(2)]`.
pub fn backward_error_symmetric(
    problem: &SpmfProblem,
    lambda: f64,
    v: &DVector<f64>,
) -> Result<(f64, f64)> {
    let ctx = residual_context(problem, lambda, v)?;
    Ok((ctx.eta, ctx.gamma * ctx.eta))
}

/// `v^T A(v) v / v^T v`, the eigenvalue estimate minimizing the backward
/// error at fixed `v`.
pub fn rayleigh_quotient(problem: &SpmfProblem, v: &DVector<f64>) -> Result<f64> {
    let av = problem.matrix(v)? * v;
    Ok(v.dot(&av) / v.dot(v))
}

/// Backward error of the vector alone: the pair `(eta, lambda)` at the
/// optimal eigenvalue, the Rayleigh quotient. The residual there is
/// orthogonal to `v`.
pub fn eigenvector_backward_error(problem: &SpmfProblem, v: &DVector<f64>) -> Result<(f64, f64)> {
    let lambda = rayleigh_quotient(problem, v)?;
    Ok((backward_error(problem, lambda, v)?, lambda))
}

/// The smallest perturbation of the requested class making `(lambda, v)` an
/// exact eigenpair.
///
/// The arbitrary and symmetric spectral-norm cases are as small as the
/// unstructured backward error; the symmetric Frobenius case pays the factor
/// `gamma`. A zero residual yields `epsilon = 0` with zero direction
/// matrices.
pub fn attaining_backward_perturbation(
    problem: &SpmfProblem,
    lambda: f64,
    v: &DVector<f64>,
    symmetric: bool,
    norm: MatrixNorm,
) -> Result<AttainingPerturbation> {
    let ctx = residual_context(problem, lambda, v)?;
    let n = problem.dim();
    if ctx.r.norm() == 0.0 {
        let zeros = vec![DMatrix::zeros(n, n); problem.term_count()];
        return Ok(AttainingPerturbation {
            epsilon: 0.0,
            direction: PerturbationDirection::new(zeros, symmetric, norm, problem.weights())?,
        });
    }
    let rhat = linalg::unit(&ctx.r)?;
    let vhat = linalg::unit(&ctx.v)?;
    let (epsilon, base) = match (symmetric, norm) {
        (false, _) => (ctx.eta, -(&rhat * vhat.transpose())),
        (true, MatrixNorm::Spectral) => (ctx.eta, -linalg::reflector_mapping(&vhat, &rhat)),
        (true, MatrixNorm::Frobenius) => {
            let vv = ctx.v.dot(&ctx.v);
            let k = (ctx.r.dot(&ctx.v) / vv) * (&ctx.v * ctx.v.transpose())
                - &ctx.v * ctx.r.transpose()
                - &ctx.r * ctx.v.transpose();
            let scale = k.norm();
            (ctx.gamma * ctx.eta, k / scale)
        }
    };
    let matrices = ctx
        .f
        .iter()
        .zip(problem.weights())
        .map(|(fi, wi)| &base * (fi.signum() * wi))
        .collect();
    Ok(AttainingPerturbation {
        epsilon,
        direction: PerturbationDirection::new(matrices, symmetric, norm, problem.weights())?,
    })
}

/// Backward errors of one approximate pair in every class, with the
/// perturbations attaining them.
#[derive(Debug, Clone)]
pub struct BackwardErrorReport {
    /// The eigenvalue estimate the residual was formed with.
    pub lambda: f64,
    /// Backward error under arbitrary perturbations.
    pub eta: f64,
    /// Backward error under symmetric perturbations, spectral norm.
    pub eta_sym_spectral: f64,
    /// Backward error under symmetric perturbations, Frobenius norm.
    pub eta_sym_frobenius: f64,
    /// Frobenius symmetry factor `gamma = sqrt(1 + sin^2 t)`.
    pub gamma: f64,
    /// `||A(v) v - lambda v||` at the vector as supplied.
    pub residual_norm: f64,
    /// Smallest exactness-restoring perturbation per class.
    pub attaining: BTreeMap<PerturbationClass, AttainingPerturbation>,
}

/// Computes every backward error of the pair together with its attaining
/// perturbation.
pub fn backward_error_report(
    problem: &SpmfProblem,
    lambda: f64,
    v: &DVector<f64>,
) -> Result<BackwardErrorReport> {
    let ctx = residual_context(problem, lambda, v)?;
    let mut attaining = BTreeMap::new();
    for (class, symmetric, norm) in [
        (PerturbationClass::Arbitrary, false, MatrixNorm::Spectral),
        (
            PerturbationClass::SymmetricSpectral,
            true,
            MatrixNorm::Spectral,
        ),
        (
            PerturbationClass::SymmetricFrobenius,
            true,
            MatrixNorm::Frobenius,
        ),
    ] {
        attaining.insert(
            class,
            attaining_backward_perturbation(problem, lambda, v, symmetric, norm)?,
        );
    }
    Ok(BackwardErrorReport {
        lambda,
        eta: ctx.eta,
        eta_sym_spectral: ctx.eta,
        eta_sym_frobenius: ctx.gamma * ctx.eta,
        gamma: ctx.gamma,
        residual_norm: ctx.r.norm(),
        attaining,
    })
}

/// Residual of `(lambda, v)` for the problem perturbed by `epsilon` times a
/// direction, holding the coefficients at their unperturbed values. Zero,
/// up to rounding, for the pairs returned by
/// [`attaining_backward_perturbation`].
pub fn perturbed_residual(
    problem: &SpmfProblem,
    lambda: f64,
    v: &DVector<f64>,
    epsilon: f64,
    direction: &PerturbationDirection,
) -> Result<DVector<f64>> {
    let f = problem.coefficient_values(v)?;
    let mut r = spectral::residual(problem, lambda, v)?;
    for (fi, e) in f.iter().zip(direction.matrices()) {
        r += (epsilon * fi) * (e * v);
    }
    Ok(r)
}
