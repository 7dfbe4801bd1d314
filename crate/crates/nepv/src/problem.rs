//! Sum-of-products eigenvector-nonlinear eigenvalue problems.
//!
//! A problem of dimension `n` is a finite sum
//!
//! ```text
//! A(v) = f_1(v) A_1 + ... + f_m(v) A_m
//! ```
//!
//! with symmetric matrices `A_i` and scalar coefficients `f_i` that are
//! invariant under nonzero rescaling of `v`. Eigenpairs solve
//! `A(v) v = lambda v`. Perturbation analysis measures each term against a
//! nonnegative weight `w_i`, by default the spectral norm of `A_i`.
//!
//! The central structural fact, used all over the crate, is that the Jacobian
//! of the map `v -> A(v) v`,
//!
//! ```text
//! J(v) = A(v) + sum_i A_i v (grad f_i(v))^T ,
//! ```
//!
//! satisfies `J(v) v = A(v) v` whenever every `f_i` is scaling invariant, so
//! eigenpairs of the nonlinear problem are eigenpairs of `J(v)` as well.
//! `J(v)` is generally not symmetric, which is why left eigenvectors enter the
//! condition-number formulas.

use nalgebra::{DMatrix, DVector};

use crate::coefficient::Coefficient;
use crate::error::{Error, Result};
use crate::linalg;

/// Relative Frobenius tolerance under which a nominally symmetric matrix is
/// silently replaced by its symmetric part. Larger deviations are rejected.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// One term `f_i(v) A_i` of the sum.
#[derive(Debug, Clone)]
pub struct Term {
    matrix: DMatrix<f64>,
    coefficient: Coefficient,
}

impl Term {
    /// The symmetric matrix `A_i`.
    #[must_use]
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// The scalar coefficient `f_i`.
    #[must_use]
    pub fn coefficient(&self) -> &Coefficient {
        &self.coefficient
    }
}

/// How perturbation weights `w_i` are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightPolicy {
    /// `w_i = ||A_i||_2`, the default.
    Relative,
    /// `w_i = 1` for every term.
    Unit,
    /// User-supplied nonnegative weights, one per term.
    Fixed(Vec<f64>),
}

/// Outcome of a scaling-invariance probe.
#[derive(Debug, Clone)]
pub struct ScalingCheck {
    /// `max_alpha ||A(alpha v) - A(v)||_F` over the probed scale factors.
    pub matrix_deviation: f64,
    /// `||J(v) v - A(v) v||`, which vanishes exactly for scaling-invariant
    /// coefficients. `None` when some coefficient provides no gradient.
    pub identity_residual: Option<f64>,
}

impl ScalingCheck {
    /// Whether both probes stay within `tol` (an absent identity probe only
    /// requires the matrix deviation to pass).
    #[must_use]
    pub fn is_invariant(&self, tol: f64) -> bool {
        self.matrix_deviation <= tol && self.identity_residual.map_or(true, |r| r <= tol)
    }
}

/// A sum-of-products problem together with its perturbation weights.
#[derive(Debug, Clone)]
pub struct SpmfProblem {
    n: usize,
    terms: Vec<Term>,
    weights: Vec<f64>,
}

impl SpmfProblem {
    /// Builds a problem from `(A_i, f_i)` pairs.
    ///
    /// Every `A_i` must be square of one common size and symmetric up to
    /// [`SYMMETRY_TOL`] (relative Frobenius); matrices within the tolerance
    /// are replaced by their symmetric part, anything worse is rejected.
    /// Rational-quadratic coefficient matrices get the same treatment. The
    /// weight policy is resolved immediately, so the stored weights are plain
    /// numbers from here on.
    pub fn new(terms: Vec<(DMatrix<f64>, Coefficient)>, policy: WeightPolicy) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidProblem("a problem needs at least one term".into()));
        }
        let n = terms[0].0.nrows();
        if n == 0 {
            return Err(Error::InvalidProblem("a problem needs dimension at least one".into()));
        }
        let mut checked = Vec::with_capacity(terms.len());
        for (matrix, coefficient) in terms {
            if matrix.nrows() != n || matrix.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: matrix.nrows().max(matrix.ncols()),
                });
            }
            let dev = linalg::relative_asymmetry(&matrix);
            if dev > SYMMETRY_TOL {
                return Err(Error::NotSymmetric { deviation: dev });
            }
            let coefficient = match coefficient {
                Coefficient::RationalQuadratic(b) => {
                    if b.nrows() != n || b.ncols() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            found: b.nrows().max(b.ncols()),
                        });
                    }
                    Coefficient::rational_quadratic(b)?
                }
                other => other,
            };
            checked.push(Term {
                matrix: linalg::symmetric_part(&matrix),
                coefficient,
            });
        }
        let weights = resolve_weights(&checked, &policy)?;
        Ok(SpmfProblem {
            n,
            terms: checked,
            weights,
        })
    }

    /// Problem dimension `n`.
    #[must_use]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of terms `m`.
    #[must_use]
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// The terms `(A_i, f_i)`.
    #[must_use]
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// The resolved perturbation weights `w_i`.
    #[must_use]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Replaces the weights with a newly resolved policy.
    pub fn set_weights(&mut self, policy: WeightPolicy) -> Result<()> {
        self.weights = resolve_weights(&self.terms, &policy)?;
        Ok(())
    }

    fn check_vector(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        if v.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(())
    }

    /// Evaluates all coefficients `f_i(v)` at a nonzero vector.
    pub fn coefficient_values(&self, v: &DVector<f64>) -> Result<Vec<f64>> {
        self.check_vector(v)?;
        self.terms.iter().map(|t| t.coefficient.evaluate(v)).collect()
    }

    /// Assembles `A(v) = sum_i f_i(v) A_i`.
    pub fn matrix(&self, v: &DVector<f64>) -> Result<DMatrix<f64>> {
        let f = self.coefficient_values(v)?;
        let mut a = DMatrix::zeros(self.n, self.n);
        for (fi, term) in f.iter().zip(&self.terms) {
            a += *fi * &term.matrix;
        }
        Ok(a)
    }

    /// Assembles the Jacobian `J(v) = A(v) + sum_i A_i v (grad f_i(v))^T` of
    /// the map `v -> A(v) v`. Requires every coefficient to provide a
    /// gradient.
    pub fn jacobian(&self, v: &DVector<f64>) -> Result<DMatrix<f64>> {
        let mut j = self.matrix(v)?;
        for term in &self.terms {
            let g = term.coefficient.gradient(v)?;
            let av = &term.matrix * v;
            j += av * g.transpose();
        }
        Ok(j)
    }

    /// Central finite-difference approximation of the Jacobian of
    /// `v -> A(v) v`, column `j` being
    /// `(A(v + h e_j)(v + h e_j) - A(v - h e_j)(v - h e_j)) / (2 h)`.
    /// Needs no gradients; its use is cross-checking [`SpmfProblem::jacobian`].
    pub fn finite_difference_jacobian(&self, v: &DVector<f64>, h: f64) -> Result<DMatrix<f64>> {
        self.check_vector(v)?;
        if h <= 0.0 {
            return Err(Error::InvalidProblem("step size must be positive".into()));
        }
        let mut j = DMatrix::zeros(self.n, self.n);
        for col in 0..self.n {
            let mut vp = v.clone();
            let mut vm = v.clone();
            vp[col] += h;
            vm[col] -= h;
            let gp = self.matrix(&vp)? * &vp;
            let gm = self.matrix(&vm)? * &vm;
            j.set_column(col, &((gp - gm) / (2.0 * h)));
        }
        Ok(j)
    }

    /// Probes scaling invariance at `v` with the given nonzero scale factors
    /// and, when gradients are available, evaluates the identity
    /// `J(v) v = A(v) v` that invariance implies.
    pub fn check_scaling_invariance(&self, v: &DVector<f64>, scales: &[f64]) -> Result<ScalingCheck> {
        self.check_vector(v)?;
        let a = self.matrix(v)?;
        let mut deviation: f64 = 0.0;
        for &alpha in scales {
            if alpha == 0.0 {
                return Err(Error::ZeroScale);
            }
            let scaled = self.matrix(&(alpha * v))?;
            deviation = deviation.max((&scaled - &a).norm());
        }
        let identity_residual = if self.terms.iter().all(|t| t.coefficient.has_gradient()) {
            let j = self.jacobian(v)?;
            Some((&j * v - &a * v).norm())
        } else {
            None
        };
        Ok(ScalingCheck {
            matrix_deviation: deviation,
            identity_residual,
        })
    }

    /// Returns the problem with every coefficient replaced by its normalized
    /// wrapper `f_i(v / ||v||)`, which is scaling invariant by construction.
    /// Matrices and weights are kept as they are. Built-in coefficient kinds
    /// are already invariant, so for them this is the identity.
    #[must_use]
    pub fn rescale_to_invariant(&self) -> SpmfProblem {
        SpmfProblem {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    matrix: t.matrix.clone(),
                    coefficient: t.coefficient.normalized(),
                })
                .collect(),
            weights: self.weights.clone(),
        }
    }

    /// The perturbation scale `sum_i |f_i(v)| w_i` that normalizes backward
    /// errors and condition numbers.
    pub fn perturbation_scale(&self, v: &DVector<f64>) -> Result<f64> {
        let f = self.coefficient_values(v)?;
        Ok(f.iter().zip(&self.weights).map(|(fi, wi)| fi.abs() * wi).sum())
    }
}

fn resolve_weights(terms: &[Term], policy: &WeightPolicy) -> Result<Vec<f64>> {
    match policy {
        WeightPolicy::Relative => Ok(terms
            .iter()
            .map(|t| linalg::spectral_norm(&t.matrix))
            .collect()),
        WeightPolicy::Unit => Ok(vec![1.0; terms.len()]),
        WeightPolicy::Fixed(w) => {
            if w.len() != terms.len() {
                return Err(Error::InvalidWeights(format!(
                    "expected {} weights, found {}",
                    terms.len(),
                    w.len()
                )));
            }
            if let Some(bad) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(Error::InvalidWeights(format!(
                    "weights must be finite and nonnegative, found {bad}"
                )));
            }
            Ok(w.clone())
        }
    }
}

/// An eigenpair with its residual, the vector stored at unit norm.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    /// The eigenvalue.
    pub lambda: f64,
    /// The eigenvector, normalized to `||v|| = 1`.
    pub vector: DVector<f64>,
    /// `||A(v) v - lambda v||`, recomputed at construction.
    pub residual_norm: f64,
}

impl Eigenpair {
    /// Normalizes `vector` and records the residual of the pair.
    pub fn new(problem: &SpmfProblem, lambda: f64, vector: &DVector<f64>) -> Result<Self> {
        let v = linalg::unit(vector)?;
        let residual_norm = (problem.matrix(&v)? * &v - lambda * &v).norm();
        Ok(Eigenpair {
            lambda,
            vector: v,
            residual_norm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    /// Two-term fixture: A(v) = A_0 + f(v) A_1 with a rational-quadratic f.
    fn two_term() -> SpmfProblem {
        let a0 = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 1.0, 1.0, -2.0, -2.0, 1.0, -2.0, 0.0]);
        let a1 = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 2.0, -1.0, 0.0, -1.0, 5.0]);
        let b = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 2.0, -1.0, 2.0, 1.0, 2.0, 1.0, 1.0]);
        SpmfProblem::new(
            vec![
                (a0, Coefficient::Constant(1.0)),
                (a1, Coefficient::rational_quadratic(b).unwrap()),
            ],
            WeightPolicy::Relative,
        )
        .unwrap()
    }

    #[test]
    fn assembly_matches_hand_sum() {
        let p = two_term();
        let v = DVector::from_vec(vec![0.5, -0.25, 1.0]);
        let f = p.coefficient_values(&v).unwrap();
        let a = p.matrix(&v).unwrap();
        let expected = p.terms()[0].matrix() + f[1] * p.terms()[1].matrix();
        assert_relative_eq!((a - expected).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = two_term();
        let v = DVector::from_vec(vec![0.7, 0.2, -0.4]);
        let j = p.jacobian(&v).unwrap();
        let fd = p.finite_difference_jacobian(&v, 1e-5).unwrap();
        assert_relative_eq!((&j - &fd).norm() / j.norm(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn jacobian_identity_holds_for_invariant_coefficients() {
        let p = two_term();
        let v = DVector::from_vec(vec![0.7, 0.2, -0.4]);
        let check = p.check_scaling_invariance(&v, &[2.0, -3.0, 1e-3]).unwrap();
        assert!(check.matrix_deviation < 1e-13);
        assert!(check.identity_residual.unwrap() < 1e-13);
        assert!(check.is_invariant(1e-12));
    }

    #[test]
    fn non_invariant_custom_is_flagged_and_repaired() {
        let a = DMatrix::<f64>::identity(2, 2);
        let p = SpmfProblem::new(
            vec![(
                a,
                Coefficient::custom(Arc::new(|v: &DVector<f64>| v.norm()), None),
            )],
            WeightPolicy::Unit,
        )
        .unwrap();
        let v = DVector::from_vec(vec![3.0, 4.0]);
        let check = p.check_scaling_invariance(&v, &[2.0]).unwrap();
        assert!(check.matrix_deviation > 1.0);
        assert!(check.identity_residual.is_none());

        let fixed = p.rescale_to_invariant();
        let again = fixed.check_scaling_invariance(&v, &[2.0, -3.0, 1e-3]).unwrap();
        assert!(again.matrix_deviation < 1e-12);
    }

    #[test]
    fn relative_weights_are_spectral_norms() {
        let p = two_term();
        let w = p.weights();
        assert_relative_eq!(w[0], linalg::spectral_norm(p.terms()[0].matrix()), max_relative = 1e-14);
        assert_relative_eq!(w[1], linalg::spectral_norm(p.terms()[1].matrix()), max_relative = 1e-14);
    }

    #[test]
    fn weight_policies_resolve_and_validate() {
        let mut p = two_term();
        p.set_weights(WeightPolicy::Unit).unwrap();
        assert_eq!(p.weights(), &[1.0, 1.0]);
        p.set_weights(WeightPolicy::Fixed(vec![0.5, 2.0])).unwrap();
        assert_eq!(p.weights(), &[0.5, 2.0]);
        assert!(matches!(
            p.set_weights(WeightPolicy::Fixed(vec![1.0])),
            Err(Error::InvalidWeights(_))
        ));
        assert!(matches!(
            p.set_weights(WeightPolicy::Fixed(vec![-1.0, 1.0])),
            Err(Error::InvalidWeights(_))
        ));
    }

    #[test]
    fn asymmetric_term_is_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(
            SpmfProblem::new(vec![(a, Coefficient::Constant(1.0))], WeightPolicy::Unit),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn nearly_symmetric_term_is_symmetrized() {
        let eps = 1e-14;
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0 + eps, 1.0, 1.0]);
        let p = SpmfProblem::new(vec![(a, Coefficient::Constant(1.0))], WeightPolicy::Unit).unwrap();
        let m = p.terms()[0].matrix();
        assert_eq!(m[(0, 1)], m[(1, 0)]);
    }

    #[test]
    fn zero_scale_is_rejected() {
        let p = two_term();
        let v = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert!(matches!(
            p.check_scaling_invariance(&v, &[0.0]),
            Err(Error::ZeroScale)
        ));
    }

    #[test]
    fn eigenpair_normalizes_and_records_residual() {
        let p = SpmfProblem::new(
            vec![(
                DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0])),
                Coefficient::Constant(1.0),
            )],
            WeightPolicy::Relative,
        )
        .unwrap();
        let pair = Eigenpair::new(&p, 2.0, &DVector::from_vec(vec![3.0, 0.0])).unwrap();
        assert_relative_eq!(pair.vector.norm(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(pair.residual_norm, 0.0, epsilon = 1e-15);
        let off = Eigenpair::new(&p, 1.9, &DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_relative_eq!(off.residual_norm, 0.1, max_relative = 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let p = two_term();
        assert!(matches!(
            p.matrix(&DVector::from_vec(vec![1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
