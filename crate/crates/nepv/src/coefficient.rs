//! Scalar coefficient functions.
//!
//! A problem matrix is assembled as a weighted sum `A(v) = sum_i f_i(v) A_i`
//! where each `f_i` maps a nonzero vector to a real number. The built-in kinds
//! are scaling invariant, `f(alpha v) = f(v)` for every `alpha != 0`, which is
//! the structural assumption behind every formula in this crate. Custom
//! closures are accepted as well; whether they are invariant can be checked
//! after the fact with
//! [`SpmfProblem::check_scaling_invariance`](crate::problem::SpmfProblem::check_scaling_invariance).

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::SYMMETRY_TOL;

/// Closure evaluating a scalar coefficient at a nonzero vector.
pub type ScalarFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;

/// Closure evaluating the gradient of a scalar coefficient.
pub type GradientFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;

/// A scalar coefficient `f(v)` attached to one term of the sum.
#[derive(Clone)]
pub enum Coefficient {
    /// `f(v) = c`, gradient zero.
    Constant(f64),
    /// `f(v) = (v^T B v) / (v^T v)` with a symmetric matrix `B`.
    RationalQuadratic(DMatrix<f64>),
    /// User-supplied evaluation and, optionally, an analytic gradient.
    Custom {
        eval: ScalarFn,
        gradient: Option<GradientFn>,
    },
}

impl Coefficient {
    /// Builds a rational-quadratic coefficient, symmetrizing `b` when its
    /// relative asymmetry is within [`SYMMETRY_TOL`] and rejecting it
    /// otherwise.
    pub fn rational_quadratic(b: DMatrix<f64>) -> Result<Self> {
        if !b.is_square() {
            return Err(Error::DimensionMismatch {
                expected: b.nrows(),
                found: b.ncols(),
            });
        }
        let dev = linalg::relative_asymmetry(&b);
        if dev > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { deviation: dev });
        }
        Ok(Coefficient::RationalQuadratic(linalg::symmetric_part(&b)))
    }

    /// Builds a custom coefficient from closures.
    pub fn custom(eval: ScalarFn, gradient: Option<GradientFn>) -> Self {
        Coefficient::Custom { eval, gradient }
    }

    /// Evaluates `f(v)`. The zero vector is rejected for every kind since the
    /// scaling-invariant setting leaves `f` undefined there.
    pub fn evaluate(&self, v: &DVector<f64>) -> Result<f64> {
        let vv = v.norm_squared();
        if vv == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(match self {
            Coefficient::Constant(c) => *c,
            Coefficient::RationalQuadratic(b) => v.dot(&(b * v)) / vv,
            Coefficient::Custom { eval, .. } => eval(v),
        })
    }

    /// Evaluates the gradient of `f` at `v`.
    ///
    /// For the rational quadratic the analytic form
    /// `grad f(v) = 2 (B v - f(v) v) / (v^T v)` is used. Custom coefficients
    /// without a gradient closure report [`Error::MissingGradient`].
    pub fn gradient(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        let vv = v.norm_squared();
        if vv == 0.0 {
            return Err(Error::ZeroVector);
        }
        match self {
            Coefficient::Constant(_) => Ok(DVector::zeros(v.len())),
            Coefficient::RationalQuadratic(b) => {
                let bv = b * v;
                let f = v.dot(&bv) / vv;
                Ok((bv - f * v) * (2.0 / vv))
            }
            Coefficient::Custom { gradient, .. } => match gradient {
                Some(g) => Ok(g(v)),
                None => Err(Error::MissingGradient),
            },
        }
    }

    /// Whether [`Coefficient::gradient`] can succeed.
    #[must_use]
    pub fn has_gradient(&self) -> bool {
        !matches!(self, Coefficient::Custom { gradient: None, .. })
    }

    /// Whether this coefficient has a file representation.
    #[must_use]
    pub fn is_serializable(&self) -> bool {
        !matches!(self, Coefficient::Custom { .. })
    }

    /// Wraps this coefficient as `f(v / ||v||)`, which is scaling invariant by
    /// construction. Built-in kinds are already invariant and returned
    /// unchanged; custom closures are composed with the normalization, their
    /// gradients with the corresponding chain rule.
    #[must_use]
    pub fn normalized(&self) -> Self {
        match self {
            Coefficient::Constant(_) | Coefficient::RationalQuadratic(_) => self.clone(),
            Coefficient::Custom { eval, gradient } => {
                let e = Arc::clone(eval);
                let wrapped_eval: ScalarFn = Arc::new(move |v: &DVector<f64>| e(&(v / v.norm())));
                let wrapped_grad: Option<GradientFn> = gradient.as_ref().map(|g| {
                    let g = Arc::clone(g);
                    let f: GradientFn = Arc::new(move |v: &DVector<f64>| {
                        // d/dv f(v/||v||) = (I - w w^T) grad f(w) / ||v||, w = v/||v||
                        let nv = v.norm();
                        let w = v / nv;
                        let gw = g(&w);
                        (&gw - &w * w.dot(&gw)) / nv
                    });
                    f
                });
                Coefficient::Custom {
                    eval: wrapped_eval,
                    gradient: wrapped_grad,
                }
            }
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "Constant({c})"),
            Coefficient::RationalQuadratic(b) => {
                write!(f, "RationalQuadratic({}x{})", b.nrows(), b.ncols())
            }
            Coefficient::Custom { gradient, .. } => {
                write!(f, "Custom {{ gradient: {} }}", gradient.is_some())
            }
        }
    }
}
