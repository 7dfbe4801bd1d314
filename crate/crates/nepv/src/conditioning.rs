//! Condition numbers of simple eigenvalues and eigenvectors, and the
//! perturbations that attain them.
//!
//! Perturbing each term matrix `A_i` to `A_i + eps E_i` with `||E_i|| <= w_i`
//! moves an eigenpair `(lambda, v)` by an amount whose first-order worst case
//! over all admissible directions defines the condition numbers computed here.
//! Three perturbation classes are covered: arbitrary matrices measured in
//! either norm, symmetric matrices in the spectral norm, and symmetric
//! matrices in the Frobenius norm. For each class the worst case is attained
//! by an explicit direction, returned as a [`PerturbationDirection`] so the
//! bound can be checked against the actual sensitivity.
//!
//! With unit-norm left and right eigenvectors `u` and `v` of the Jacobian
//! `J(v)` and `alpha = sum_i |f_i(v)| w_i`:
//!
//! ```text
//! kappa(lambda)        = alpha / (|lambda| |u^T v|)        (relative)
//! kappa_sym_2(lambda)  = kappa(lambda)
//! kappa_sym_F(lambda)  = beta kappa(lambda),   beta = sqrt((1 + cos^2 t)/2)
//! ```
//!
//! where `t` is the angle between `u` and `v`. Symmetry of the perturbation
//! costs nothing in the spectral norm and a factor `beta in [1/sqrt(2), 1]`
//! in the Frobenius norm. For the eigenvector, with
//! `Z = V (V^T (J - lambda I) V)^{-1} V^T` built on an orthonormal basis `V`
//! of the complement of `v`:
//!
//! ```text
//! kappa(v)       = ||Z||_2 alpha
//! kappa_sym_2(v) = kappa(v)
//! kappa_sym_F(v) = kappa(v) / sqrt(2)
//! ```

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, MatrixNorm};
use crate::problem::SpmfProblem;
use crate::spectral::{self, EIGENVALUE_MATCH_TOL};

/// Eigenvalues below this magnitude have no relative condition number.
pub const ZERO_EIGENVALUE_FLOOR: f64 = 1e-300;

/// Slack allowed on `||E_i|| <= w_i`, relative to `w_i`.
pub const DIRECTION_NORM_SLACK: f64 = 1e-12;

/// Relative asymmetry allowed in a direction declared symmetric.
pub const DIRECTION_SYMMETRY_TOL: f64 = 1e-13;

/// Whether eigenvalue condition numbers are scaled by `1 / |lambda|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionMode {
    /// First-order bound on `|d lambda| / |lambda|`.
    Relative,
    /// First-order bound on `|d lambda|`.
    Absolute,
}

/// The six first-order worst cases a report can attain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Quantity {
    /// `kappa(lambda)`, arbitrary perturbations (either norm).
    Eigenvalue,
    /// `kappa_sym_2(lambda)`, symmetric perturbations, spectral norm.
    EigenvalueSymmetricSpectral,
    /// `kappa_sym_F(lambda)`, symmetric perturbations, Frobenius norm.
    EigenvalueSymmetricFrobenius,
    /// `kappa(v)`, arbitrary perturbations (either norm).
    Eigenvector,
    /// `kappa_sym_2(v)`, symmetric perturbations, spectral norm.
    EigenvectorSymmetricSpectral,
    /// `kappa_sym_F(v)`, symmetric perturbations, Frobenius norm.
    EigenvectorSymmetricFrobenius,
}

/// A normalized family of perturbation matrices, one per term.
///
/// Construction enforces the class: every `E_i` is square of a common size,
/// `||E_i||` stays within `w_i` up to [`DIRECTION_NORM_SLACK`], and a
/// direction declared symmetric must have relative asymmetry within
/// [`DIRECTION_SYMMETRY_TOL`]. Instances therefore certify membership in the
/// perturbation class they claim.
#[derive(Debug, Clone)]
pub struct PerturbationDirection {
    matrices: Vec<DMatrix<f64>>,
    symmetric: bool,
    norm: MatrixNorm,
}

impl PerturbationDirection {
    /// Validates the matrices against the weights and the declared class.
    pub fn new(
        matrices: Vec<DMatrix<f64>>,
        symmetric: bool,
        norm: MatrixNorm,
        weights: &[f64],
    ) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::InvalidProblem(
                "a perturbation direction needs at least one matrix".into(),
            ));
        }
        if matrices.len() != weights.len() {
            return Err(Error::InvalidWeights(format!(
                "expected {} weights, found {}",
                matrices.len(),
                weights.len()
            )));
        }
        let n = matrices[0].nrows();
        for (i, (e, &w)) in matrices.iter().zip(weights).enumerate() {
            if e.nrows() != n || e.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: e.nrows().max(e.ncols()),
                });
            }
            let norm_e = norm.of(e);
            if norm_e > w * (1.0 + DIRECTION_NORM_SLACK) {
                return Err(Error::DirectionExceedsBudget {
                    term: i,
                    norm: norm_e,
                    weight: w,
                });
            }
            if symmetric {
                let dev = linalg::relative_asymmetry(e);
                if dev > DIRECTION_SYMMETRY_TOL {
                    return Err(Error::NotSymmetric { deviation: dev });
                }
            }
        }
        Ok(Self {
            matrices,
            symmetric,
            norm,
        })
    }

    /// The matrices `E_i`, in term order.
    #[must_use]
    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    /// Whether every `E_i` is symmetric.
    #[must_use]
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// The norm the budget `||E_i|| <= w_i` is measured in.
    #[must_use]
    pub fn norm(&self) -> MatrixNorm {
        self.norm
    }

    /// Number of term matrices.
    #[must_use]
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    /// Always false; construction rejects empty directions.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }
}

/// Everything the pointwise formulas need at one eigenpair: unit eigenvector,
/// unit left eigenvector, Jacobian, coefficient values, and the weighted
/// coefficient sum `alpha`.
struct PairContext {
    vhat: DVector<f64>,
    u: DVector<f64>,
    j: DMatrix<f64>,
    f: Vec<f64>,
    alpha: f64,
}

/// Builds the shared context, rejecting vectors that fail the residual test.
/// Simplicity is enforced through the eigenvalue clustering check inside
/// `left_eigenvector`, which stays meaningful even when `|u^T v|` is tiny.
fn pair_context(problem: &SpmfProblem, lambda: f64, v: &DVector<f64>) -> Result<PairContext> {
    let vhat = linalg::unit(v)?;
    let a = problem.matrix(&vhat)?;
    let r = (&a * &vhat - lambda * &vhat).norm();
    let pair_scale = a.norm() + lambda.abs();
    if r > spectral::EIGENPAIR_RESIDUAL_TOL * pair_scale {
        return Err(Error::NotAnEigenpair {
            residual: r,
            tol: spectral::EIGENPAIR_RESIDUAL_TOL * pair_scale,
        });
    }
    let j = problem.jacobian(&vhat)?;
    let u = spectral::left_eigenvector(&j, lambda, EIGENVALUE_MATCH_TOL)?;
    let f = problem.coefficient_values(&vhat)?;
    let alpha = f
        .iter()
        .zip(problem.weights())
        .map(|(fi, wi)| fi.abs() * wi)
        .sum();
    Ok(PairContext {
        vhat,
        u,
        j,
        f,
        alpha,
    })
}

fn mode_scale(lambda: f64, mode: ConditionMode) -> Result<f64> {
    match mode {
        ConditionMode::Absolute => Ok(1.0),
        ConditionMode::Relative => {
            if lambda.abs() <= ZERO_EIGENVALUE_FLOOR {
                Err(Error::ZeroEigenvalue)
            } else {
                Ok(lambda.abs().recip())
            }
        }
    }
}

/// `beta = sqrt((1 + cos^2 theta) / 2)` for the angle between unit `u` and
/// unit `v`; the price of symmetry in the Frobenius norm.
fn symmetry_factor(alignment: f64) -> f64 {
    ((1.0 + alignment * alignment) / 2.0).sqrt()
}

/// Condition number of a simple eigenvalue under arbitrary perturbations of
/// the term matrices. The same value is attained in the spectral and the
/// Frobenius norm, so no norm argument is taken.
pub fn eigenvalue_condition(
    problem: &SpmfProblem,
    lambda: f64,
    v: &DVector<f64>,
    mode: ConditionMode,
) -> Result<f64> {
    let ctx = pair_context(problem, lambda, v)?;
    let scale = mode_scale(lambda, mode)?;
    Ok(scale * ctx.alpha / ctx.u.dot(&ctx.vhat).abs())
}

/// Condition numbers of a simple eigenvalue under symmetric perturbations,
/// returned as `(spectral, frobenius)`.
///
/// The spectral-norm value equals the unstructured condition number; the
/// Frobenius-norm value is smaller by the factor `beta <= 1`.
pub fn eigenvalue_condition_symmetric(
    problem: &SpmfProblem,
    lambda: f64,
    v: &DVector<f64>,
    mode: ConditionMode,
) -> Result<(f64, f64)> {
    let ctx = pair_context(problem, lambda, v)?;
    let scale = mode_scale(lambda, mode)?;
    let alignment = ctx.u.dot(&ctx.vhat).abs();
    let kappa = scale * ctx.alpha / alignment;
    Ok((kappa, symmetry_factor(alignment) * kappa))
}

/// First-order change of the eigenvalue along one perturbation direction,
///
/// ```text
/// lambda' = sum_i f_i(v) u^T E_i v / (u^T v) ,
/// ```
///
/// independent of the problem weights and of the scaling of `v`.
pub fn eigenvalue_sensitivity(
    problem: &SpmfProblem,
    lambda: f64,
    v: &DVector<f64>,
    direction: &PerturbationDirection,
) -> Result<f64> {
    check_direction_shape(problem, direction)?;
    let ctx = pair_context(problem, lambda, v)?;
    let numerator: f64 = ctx
        .f
        .iter()
        .zip(direction.matrices())
        .map(|(fi, e)| fi * ctx.u.dot(&(e * &ctx.vhat)))
        .sum();
    Ok(numerator / ctx.u.dot(&ctx.vhat))
}

/// First-order change of the eigenvector along one perturbation direction,
/// in the gauge that keeps `v^T v` constant:
///
/// ```text
/// v' = -Z sum_i f_i(v) E_i v ,   Z = V (V^T (J - lambda I) V)^{-1} V^T .
/// ```
///
/// The result is orthogonal to `v` and scales linearly with `||v||`.
pub fn eigenvector_sensitivity(
    problem: &SpmfProblem,
    lambda: f64,
    v: &DVector<f64>,
    direction: &PerturbationDirection,
) -> Result<DVector<f64>> {
    check_direction_shape(problem, direction)?;
    let ctx = pair_context(problem, lambda, v)?;
    let z = resolvent_projection(&ctx.j, lambda, &ctx.vhat)?;
    let mut rhs = DVector::zeros(problem.dim());
    for (fi, e) in ctx.f.iter().zip(direction.matrices()) {
        rhs += *fi * (e * v);
    }
    Ok(-(&z * rhs))
}

/// Condition number of the eigenvector of a simple eigenpair under arbitrary
/// perturbations, `||Z||_2 alpha`. Attained in both norms; invariant under
/// rescaling of `v`.
pub fn eigenvector_condition(problem: &SpmfProblem, lambda: f64, v: &DVector<f64>) -> Result<f64> {
    let ctx = pair_context(problem, lambda, v)?;
    let z = resolvent_projection(&ctx.j, lambda, &ctx.vhat)?;
    Ok(linalg::spectral_norm(&z) * ctx.alpha)
}

/// Eigenvector condition numbers under symmetric perturbations, returned as
/// `(spectral, frobenius)`. In the spectral norm symmetry costs nothing; in
/// the Frobenius norm it costs exactly `1/sqrt(2)`.
pub fn eigenvector_condition_symmetric(
    problem: &SpmfProblem,
    lambda: f64,
    v: &DVector<f64>,
) -> Result<(f64, f64)> {
    let kappa = eigenvector_condition(problem, lambda, v)?;
    Ok((kappa, kappa / std::f64::consts::SQRT_2))
}

/// Eigenvector condition number through the spectral gap, for problems whose
/// Jacobian at the eigenpair is symmetric:
///
/// ```text
/// kappa(v) = alpha / min_{mu != lambda} |mu - lambda| .
/// ```
///
/// Fails with [`Error::NotApplicable`] when `J(v)` is not symmetric (relative
/// asymmetry above `1e-10`); the general formula stays valid there and this
/// shortcut does not.
pub fn spectral_gap_condition(
    problem: &SpmfProblem,
    lambda: f64,
    v: &DVector<f64>,
) -> Result<f64> {
    let ctx = pair_context(problem, lambda, v)?;
    if linalg::relative_asymmetry(&ctx.j) > 1e-10 {
        return Err(Error::NotApplicable);
    }
    let eig = nalgebra::SymmetricEigen::new(linalg::symmetric_part(&ctx.j));
    let gap = eig
        .eigenvalues
        .iter()
        .map(|mu| (mu - lambda).abs())
        .filter(|d| *d > EIGENVALUE_MATCH_TOL * (1.0 + lambda.abs()))
        .fold(f64::INFINITY, f64::min);
    if !gap.is_finite() {
        return Err(Error::NonSimple { lambda });
    }
    Ok(ctx.alpha / gap)
}

/// Direction attaining the eigenvalue condition number of the requested
/// class. For arbitrary perturbations the rank-one `E_i = sign(f_i) w_i u
/// v^T` attains both norms at once; the symmetric spectral-norm case uses the
/// reflector mapping `v` to `u`, and the symmetric Frobenius case the scaled
/// symmetrizer of `u v^T`.
pub fn optimal_eigenvalue_perturbation(
    problem: &SpmfProblem,
    lambda: f64,
    v: &DVector<f64>,
    symmetric: bool,
    norm: MatrixNorm,
) -> Result<PerturbationDirection> {
    let ctx = pair_context(problem, lambda, v)?;
    let base = match (symmetric, norm) {
        (false, _) => &ctx.u * ctx.vhat.transpose(),
        (true, MatrixNorm::Spectral) => linalg::reflector_mapping(&ctx.vhat, &ctx.u),
        (true, MatrixNorm::Frobenius) => {
            let alignment = ctx.u.dot(&ctx.vhat).abs();
            let outer = &ctx.u * ctx.vhat.transpose();
            (&outer + outer.transpose()) / (2.0 * symmetry_factor(alignment))
        }
    };
    direction_from_base(problem, &ctx, &base, symmetric, norm)
}

/// Direction attaining the eigenvector condition number of the requested
/// class. All three constructions replace the left eigenvector by `p`, the
/// top left singular vector of `Z`, which is orthogonal to `v`; the
/// symmetric Frobenius case divides by `sqrt(2)` instead of `2 beta`.
pub fn optimal_eigenvector_perturbation(
    problem: &SpmfProblem,
    lambda: f64,
    v: &DVector<f64>,
    symmetric: bool,
    norm: MatrixNorm,
) -> Result<PerturbationDirection> {
    if problem.dim() < 2 {
        return Err(Error::InvalidProblem(
            "eigenvector perturbations need dimension at least two".into(),
        ));
    }
    let ctx = pair_context(problem, lambda, v)?;
    let z = resolvent_projection(&ctx.j, lambda, &ctx.vhat)?;
    let p = top_right_singular_vector(&z);
    let base = match (symmetric, norm) {
        (false, _) => &p * ctx.vhat.transpose(),
        (true, MatrixNorm::Spectral) => linalg::reflector_mapping(&ctx.vhat, &p),
        (true, MatrixNorm::Frobenius) => {
            let outer = &p * ctx.vhat.transpose();
            (&outer + outer.transpose()) / std::f64::consts::SQRT_2
        }
    };
    direction_from_base(problem, &ctx, &base, symmetric, norm)
}

/// All condition numbers of one eigenpair, with the directions attaining
/// them.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    /// Eigenvalue condition number, arbitrary perturbations.
    pub kappa_lambda: f64,
    /// Eigenvalue condition number, symmetric perturbations, spectral norm.
    pub kappa_lambda_sym_spectral: f64,
    /// Eigenvalue condition number, symmetric perturbations, Frobenius norm.
    pub kappa_lambda_sym_frobenius: f64,
    /// Eigenvector condition number, arbitrary perturbations.
    pub kappa_v: f64,
    /// Eigenvector condition number, symmetric perturbations, spectral norm.
    pub kappa_v_sym_spectral: f64,
    /// Eigenvector condition number, symmetric perturbations, Frobenius norm.
    pub kappa_v_sym_frobenius: f64,
    /// `|u^T v|` for unit left and right eigenvectors.
    pub alignment: f64,
    /// Frobenius symmetry factor `beta = sqrt((1 + alignment^2) / 2)`.
    pub beta: f64,
    /// Scaling applied to the eigenvalue quantities.
    pub mode: ConditionMode,
    /// Attaining direction for each quantity. The eigenvector entries are
    /// absent for one-dimensional problems.
    pub attaining: BTreeMap<Quantity, PerturbationDirection>,
}

/// Computes every condition number of the eigenpair together with its
/// attaining perturbation direction.
pub fn condition_report(
    problem: &SpmfProblem,
    lambda: f64,
    v: &DVector<f64>,
    mode: ConditionMode,
) -> Result<ConditionReport> {
    let ctx = pair_context(problem, lambda, v)?;
    let scale = mode_scale(lambda, mode)?;
    let alignment = ctx.u.dot(&ctx.vhat).abs();
    let beta = symmetry_factor(alignment);
    let kappa_lambda = scale * ctx.alpha / alignment;

    let z = resolvent_projection(&ctx.j, lambda, &ctx.vhat)?;
    let kappa_v = linalg::spectral_norm(&z) * ctx.alpha;

    let mut attaining = BTreeMap::new();
    for (quantity, symmetric, norm) in [
        (Quantity::Eigenvalue, false, MatrixNorm::Spectral),
        (
            Quantity::EigenvalueSymmetricSpectral,
            true,
            MatrixNorm::Spectral,
        ),
        (
            Quantity::EigenvalueSymmetricFrobenius,
            true,
            MatrixNorm::Frobenius,
        ),
    ] {
        attaining.insert(
            quantity,
            optimal_eigenvalue_perturbation(problem, lambda, v, symmetric, norm)?,
        );
    }
    if problem.dim() >= 2 {
        for (quantity, symmetric, norm) in [
            (Quantity::Eigenvector, false, MatrixNorm::Spectral),
            (
                Quantity::EigenvectorSymmetricSpectral,
                true,
                MatrixNorm::Spectral,
            ),
            (
                Quantity::EigenvectorSymmetricFrobenius,
                true,
                MatrixNorm::Frobenius,
            ),
        ] {
            attaining.insert(
                quantity,
                optimal_eigenvector_perturbation(problem, lambda, v, symmetric, norm)?,
            );
        }
    }

    Ok(ConditionReport {
        kappa_lambda,
        kappa_lambda_sym_spectral: kappa_lambda,
        kappa_lambda_sym_frobenius: beta * kappa_lambda,
        kappa_v,
        kappa_v_sym_spectral: kappa_v,
        kappa_v_sym_frobenius: kappa_v / std::f64::consts::SQRT_2,
        alignment,
        beta,
        mode,
        attaining,
    })
}

/// `Z = V (V^T (J - lambda I) V)^{-1} V^T` on the orthogonal complement of
/// the unit vector `vhat`. A singular reduced matrix means the eigenvalue is
/// not simple.
fn resolvent_projection(
    j: &DMatrix<f64>,
    lambda: f64,
    vhat: &DVector<f64>,
) -> Result<DMatrix<f64>> {
    let n = j.nrows();
    let basis = spectral::orthogonal_complement(vhat)?;
    let shifted = j - lambda * DMatrix::identity(n, n);
    let reduced = basis.transpose() * &shifted * &basis;
    let lu = reduced.lu();
    let solved = lu
        .solve(&basis.transpose())
        .ok_or(Error::NonSimple { lambda })?;
    Ok(&basis * solved)
}

/// Top right singular vector of `m` (first row of `V^T`), the unit vector a
/// matrix amplifies the most.
fn top_right_singular_vector(m: &DMatrix<f64>) -> DVector<f64> {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("right singular vectors were requested");
    DVector::from_iterator(m.ncols(), vt.row(0).iter().copied())
}

fn check_direction_shape(problem: &SpmfProblem, direction: &PerturbationDirection) -> Result<()> {
    if direction.len() != problem.term_count() {
        return Err(Error::InvalidProblem(format!(
            "direction has {} matrices for a problem with {} terms",
            direction.len(),
            problem.term_count()
        )));
    }
    if direction.matrices()[0].nrows() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            found: direction.matrices()[0].nrows(),
        });
    }
    Ok(())
}

/// Scales a unit-norm base pattern by `sign(f_i) w_i` per term and packages
/// the result as a validated direction.
fn direction_from_base(
    problem: &SpmfProblem,
    ctx: &PairContext,
    base: &DMatrix<f64>,
    symmetric: bool,
    norm: MatrixNorm,
) -> Result<PerturbationDirection> {
    let matrices = ctx
        .f
        .iter()
        .zip(problem.weights())
        .map(|(fi, wi)| base * (fi.signum() * wi))
        .collect();
    PerturbationDirection::new(matrices, symmetric, norm, problem.weights())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::Coefficient;
    use crate::problem::WeightPolicy;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector};

    /// Linear symmetric problem `A v = lambda v` with `A = diag(3, 1, -2)`.
    fn linear_diag() -> SpmfProblem {
        let a = DMatrix::from_diagonal(&dvector![3.0, 1.0, -2.0]);
        SpmfProblem::new(vec![(a, Coefficient::Constant(1.0))], WeightPolicy::Relative).unwrap()
    }

    /// Two-term problem whose Jacobian at `e_1` is `[[2, 2], [0, 1]]`, the
    /// 2x2 member of the scaled-Wilkinson family.
    fn wilkinson_two() -> SpmfProblem {
        let a0 = DMatrix::identity(2, 2);
        let a1 = dmatrix![1.0, 0.0; 0.0, 0.0];
        let b = dmatrix![1.0, 1.0; 1.0, 0.0];
        SpmfProblem::new(
            vec![
                (a0, Coefficient::Constant(1.0)),
                (a1, Coefficient::rational_quadratic(b).unwrap()),
            ],
            WeightPolicy::Unit,
        )
        .unwrap()
    }

    #[test]
    fn linear_symmetric_eigenvalue_is_perfectly_aligned() {
        let p = linear_diag();
        let v = dvector![1.0, 0.0, 0.0];
        let abs = eigenvalue_condition(&p, 3.0, &v, ConditionMode::Absolute).unwrap();
        // u = v, alpha = ||A||_2 = 3.
        assert_relative_eq!(abs, 3.0, max_relative = 1e-12);
        let rel = eigenvalue_condition(&p, 3.0, &v, ConditionMode::Relative).unwrap();
        assert_relative_eq!(rel, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn wilkinson_two_matches_closed_form() {
        let p = wilkinson_two();
        let v = dvector![1.0, 0.0];
        // J(e_1) = [[2, 2], [0, 1]]: u = (1, 2)/sqrt(5), alpha = |1| + |1|,
        // so kappa_rel = 2 sqrt(5) / 2 = sqrt(5).
        let rel = eigenvalue_condition(&p, 2.0, &v, ConditionMode::Relative).unwrap();
        assert_relative_eq!(rel, 5.0_f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn symmetric_variants_relate_through_beta() {
        let p = wilkinson_two();
        let v = dvector![1.0, 0.0];
        let kappa = eigenvalue_condition(&p, 2.0, &v, ConditionMode::Relative).unwrap();
        let (spec, fro) = eigenvalue_condition_symmetric(&p, 2.0, &v, ConditionMode::Relative).unwrap();
        assert_relative_eq!(spec, kappa, max_relative = 1e-14);
        let alignment = 1.0 / 5.0_f64.sqrt();
        let beta = ((1.0 + alignment * alignment) / 2.0).sqrt();
        assert_relative_eq!(fro, beta * kappa, max_relative = 1e-13);
    }

    #[test]
    fn sensitivity_at_optimal_direction_attains_kappa() {
        let p = wilkinson_two();
        let v = dvector![1.0, 0.0];
        let kappa_abs = eigenvalue_condition(&p, 2.0, &v, ConditionMode::Absolute).unwrap();
        for (symmetric, norm) in [
            (false, MatrixNorm::Spectral),
            (true, MatrixNorm::Spectral),
            (true, MatrixNorm::Frobenius),
        ] {
            let d = optimal_eigenvalue_perturbation(&p, 2.0, &v, symmetric, norm).unwrap();
            let lp = eigenvalue_sensitivity(&p, 2.0, &v, &d).unwrap();
            let expected = match (symmetric, norm) {
                (true, MatrixNorm::Frobenius) => {
                    let (_, fro) =
                        eigenvalue_condition_symmetric(&p, 2.0, &v, ConditionMode::Absolute)
                            .unwrap();
                    fro
                }
                _ => kappa_abs,
            };
            assert_relative_eq!(lp.abs(), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn eigenvector_sensitivity_is_orthogonal_and_attains_kappa() {
        let p = wilkinson_two();
        let v = dvector![1.0, 0.0];
        let kappa = eigenvector_condition(&p, 2.0, &v).unwrap();
        for (symmetric, norm, expected) in [
            (false, MatrixNorm::Spectral, kappa),
            (true, MatrixNorm::Spectral, kappa),
            (true, MatrixNorm::Frobenius, kappa / std::f64::consts::SQRT_2),
        ] {
            let d = optimal_eigenvector_perturbation(&p, 2.0, &v, symmetric, norm).unwrap();
            let vp = eigenvector_sensitivity(&p, 2.0, &v, &d).unwrap();
            assert_relative_eq!(vp.dot(&v), 0.0, epsilon = 1e-12);
            assert_relative_eq!(vp.norm(), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn spectral_gap_shortcut_matches_general_formula() {
        let p = linear_diag();
        let v = dvector![1.0, 0.0, 0.0];
        let by_gap = spectral_gap_condition(&p, 3.0, &v).unwrap();
        // alpha = 3, gap = |1 - 3| = 2.
        assert_relative_eq!(by_gap, 1.5, max_relative = 1e-12);
        let general = eigenvector_condition(&p, 3.0, &v).unwrap();
        assert_relative_eq!(by_gap, general, max_relative = 1e-10);
    }

    #[test]
    fn spectral_gap_rejects_nonsymmetric_jacobian() {
        let p = wilkinson_two();
        let v = dvector![1.0, 0.0];
        assert!(matches!(
            spectral_gap_condition(&p, 2.0, &v),
            Err(Error::NotApplicable)
        ));
    }

    #[test]
    fn relative_mode_rejects_zero_eigenvalue() {
        let a = DMatrix::from_diagonal(&dvector![0.0, 1.0]);
        let p =
            SpmfProblem::new(vec![(a, Coefficient::Constant(1.0))], WeightPolicy::Relative)
                .unwrap();
        let v = dvector![1.0, 0.0];
        assert!(matches!(
            eigenvalue_condition(&p, 0.0, &v, ConditionMode::Relative),
            Err(Error::ZeroEigenvalue)
        ));
        assert!(eigenvalue_condition(&p, 0.0, &v, ConditionMode::Absolute).is_ok());
    }

    #[test]
    fn direction_construction_enforces_the_class() {
        let w = [1.0, 0.5];
        let big = DMatrix::identity(2, 2) * 2.0;
        let ok = DMatrix::identity(2, 2) * 0.3;
        assert!(matches!(
            PerturbationDirection::new(
                vec![ok.clone(), big],
                false,
                MatrixNorm::Spectral,
                &w
            ),
            Err(Error::DirectionExceedsBudget { term: 1, .. })
        ));
        let skew = dmatrix![0.0, 0.3; -0.3, 0.0];
        assert!(matches!(
            PerturbationDirection::new(
                vec![ok.clone(), skew],
                true,
                MatrixNorm::Spectral,
                &w
            ),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(
            PerturbationDirection::new(vec![ok.clone(), ok], false, MatrixNorm::Frobenius, &w)
                .is_ok()
        );
    }

    #[test]
    fn report_collects_consistent_values() {
        let p = wilkinson_two();
        let v = dvector![1.0, 0.0];
        let r = condition_report(&p, 2.0, &v, ConditionMode::Relative).unwrap();
        assert_relative_eq!(r.kappa_lambda, 5.0_f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(r.kappa_lambda_sym_spectral, r.kappa_lambda);
        assert_relative_eq!(
            r.kappa_lambda_sym_frobenius,
            r.beta * r.kappa_lambda,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            r.kappa_v_sym_frobenius,
            r.kappa_v / std::f64::consts::SQRT_2,
            max_relative = 1e-14
        );
        assert_eq!(r.attaining.len(), 6);
        for d in r.attaining.values() {
            assert_eq!(d.len(), 2);
        }
    }
}
