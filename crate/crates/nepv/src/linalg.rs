//! Small dense linear-algebra helpers shared across the crate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Matrix norm used for perturbation budgets and weight policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MatrixNorm {
    /// Largest singular value.
    Spectral,
    /// Square root of the sum of squared entries.
    Frobenius,
}

impl MatrixNorm {
    /// Evaluates the norm on a dense matrix.
    #[must_use]
    pub fn of(self, m: &DMatrix<f64>) -> f64 {
        match self {
            MatrixNorm::Spectral => spectral_norm(m),
            MatrixNorm::Frobenius => m.norm(),
        }
    }
}

/// Largest singular value of `m`.
#[must_use]
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values()[0]
}

/// Smallest singular value of `m`.
#[must_use]
pub fn sigma_min(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let sv = m.singular_values();
    sv[sv.len() - 1]
}

/// Symmetric part `(m + m^T) / 2`.
#[must_use]
pub fn symmetric_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    0.5 * (m + m.transpose())
}

/// Frobenius norm of the skew part, relative to the Frobenius norm of `m`.
/// Zero matrices count as perfectly symmetric.
#[must_use]
pub fn relative_asymmetry(m: &DMatrix<f64>) -> f64 {
    let scale = m.norm();
    if scale == 0.0 {
        return 0.0;
    }
    (0.5 * (m - m.transpose())).norm() / scale
}

/// Returns `v / ||v||`, rejecting the zero vector.
pub fn unit(v: &DVector<f64>) -> Result<DVector<f64>> {
    let n = v.norm();
    if n == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(v / n)
}

/// Symmetric orthogonal `H` with `H x = y` for unit vectors `x`, `y`.
/// Built from whichever of `x - y`, `x + y` is larger; for unit input the
/// chosen difference has norm at least sqrt(2), so the construction never
/// cancels, even when `x` sits within roundoff of `y` or `-y`.
#[must_use]
pub fn reflector_mapping(x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
    let n = x.len();
    let diff = x - y;
    let sum = x + y;
    if diff.norm() >= sum.norm() {
        if diff.norm() == 0.0 {
            return DMatrix::identity(n, n);
        }
        let d = &diff / diff.norm();
        DMatrix::identity(n, n) - 2.0 * &d * d.transpose()
    } else {
        // Reflection through the line spanned by x + y also maps x to y.
        let s = &sum / sum.norm();
        2.0 * &s * s.transpose() - DMatrix::identity(n, n)
    }
}

/// Cosine of the angle between two nonzero vectors.
pub fn cosine(a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((a.dot(b) / (na * nb)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spectral_norm_of_diagonal_is_largest_entry() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -7.0, 1.0]));
        assert_relative_eq!(spectral_norm(&m), 7.0, max_relative = 1e-14);
        assert_relative_eq!(sigma_min(&m), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn frobenius_and_spectral_differ_on_identity() {
        let m = DMatrix::<f64>::identity(4, 4);
        assert_relative_eq!(MatrixNorm::Spectral.of(&m), 1.0, max_relative = 1e-14);
        assert_relative_eq!(MatrixNorm::Frobenius.of(&m), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn reflector_maps_x_to_y() {
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let y = DVector::from_vec(vec![0.0, 0.6, 0.8]);
        let h = reflector_mapping(&x, &y);
        assert_relative_eq!((&h * &x - &y).norm(), 0.0, epsilon = 1e-14);
        // involution: H^2 = I
        assert_relative_eq!((&h * &h - DMatrix::identity(3, 3)).norm(), 0.0, epsilon = 1e-13);
        // orthogonal: spectral norm 1
        assert_relative_eq!(spectral_norm(&h), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn reflector_handles_antipodal_and_equal() {
        let x = DVector::from_vec(vec![0.0, 1.0]);
        let h = reflector_mapping(&x, &(-&x));
        assert_relative_eq!((&h * &x + &x).norm(), 0.0, epsilon = 1e-14);
        let fix = reflector_mapping(&x, &x);
        assert_relative_eq!((&fix * &x - &x).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(spectral_norm(&fix), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn reflector_stable_for_nearly_equal_vectors() {
        // One ulp apart in a single component: the naive difference
        // construction would reflect about a rounding-noise axis.
        let x: DVector<f64> = DVector::from_vec(vec![-0.4742848798784381, 0.8803714288405182]);
        let mut y = x.clone();
        y[0] = f64::from_bits(y[0].to_bits() - 1);
        let h = reflector_mapping(&x, &y);
        assert_relative_eq!((&h * &x - &y).norm(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(spectral_norm(&h), 1.0, max_relative = 1e-13);
        assert_relative_eq!((&h - h.transpose()).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn asymmetry_is_relative() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0 + 1e-13, 1.0]);
        assert!(relative_asymmetry(&m) < 1e-12);
        let skew = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert_relative_eq!(relative_asymmetry(&skew), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn unit_rejects_zero() {
        assert!(matches!(unit(&DVector::zeros(3)), Err(Error::ZeroVector)));
    }
}
