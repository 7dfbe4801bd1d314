//! Newton and self-consistent-field solvers, and exhaustive enumeration for
//! two-term problems.
//!
//! Newton's method runs on the augmented system
//!
//! ```text
//! F(v, lambda) = [ A(v) v - lambda v ]      J_F = [ J(v) - lambda I   -v ]
//!                [ (2 - v^T v) / 2   ] ,          [ -v^T                0 ] ,
//! ```
//!
//! whose Jacobian is nonsingular at a solution exactly when `lambda` is a
//! simple eigenvalue of `J(v)`. The quadratic gauge keeps the iteration
//! well scaled; the returned eigenvector is normalized to unit length.
//! Convergence is measured by the backward error, so `tol` has the same
//! meaning across solvers: the computed pair is exact for term matrices
//! perturbed relatively by `tol`.
//!
//! The SCF iteration repeatedly solves the frozen linear problem
//! `A(v_k) w = mu w`, picks an eigenpair with a [`Selector`], and feeds the
//! eigenvector back in. It converges linearly when it converges at all, but
//! needs no starting eigenvalue and is a robust seed source for Newton.
//!
//! [`enumerate_eigenpairs`] finds every eigenpair of a problem with a single
//! non-constant coefficient by scanning the coefficient's value range; see
//! its documentation.

use nalgebra::{DMatrix, DVector};

use crate::backward_error;
use crate::coefficient::Coefficient;
use crate::conditioning::PerturbationDirection;
use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{Eigenpair, SpmfProblem};
use crate::spectral;

/// Stopping rules shared by the solvers.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Iteration cap before [`Error::MaxIterExceeded`].
    pub max_iter: usize,
    /// Backward-error level accepted as converged.
    pub tol: f64,
    /// Step length fraction; `1.0` is a full Newton or SCF step.
    pub damping: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 60,
            tol: 1e-13,
            damping: 1.0,
        }
    }
}

/// One solver step: the backward error after it and the step length taken.
#[derive(Debug, Clone, Copy)]
pub struct IterationRecord {
    /// Backward error of the iterate produced by this step.
    pub eta: f64,
    /// Norm of the update (eigenvector part and, for Newton, eigenvalue).
    pub step_norm: f64,
}

/// A converged solve with its iteration history.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// The computed eigenpair, vector at unit norm.
    pub eigenpair: Eigenpair,
    /// Backward error of the starting guess.
    pub initial_eta: f64,
    /// Per-step history, in order. The last entry's `eta` is below the
    /// requested tolerance.
    pub iterations: Vec<IterationRecord>,
}

/// Which eigenpair of the frozen linear problem the SCF step follows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selector {
    /// Smallest eigenvalue.
    Smallest,
    /// Largest eigenvalue.
    Largest,
    /// Eigenvalue closest to the given target.
    NearestTo(f64),
}

impl Selector {
    fn pick(self, eigenvalues: &DVector<f64>) -> usize {
        let key = |i: usize| match self {
            Selector::Smallest => eigenvalues[i],
            Selector::Largest => -eigenvalues[i],
            Selector::NearestTo(t) => (eigenvalues[i] - t).abs(),
        };
        (0..eigenvalues.len())
            .min_by(|&a, &b| key(a).total_cmp(&key(b)))
            .expect("eigenvalue set is nonempty")
    }
}

/// The operator a Newton solve runs on: the evaluated matrix `A(v)`, the
/// Jacobian of `v -> A(v) v`, and the backward-error denominator
/// `alpha(v) ||v||`. Abstracting these lets the same core solve a problem
/// and its perturbations without materializing perturbed term matrices
/// (which may be nonsymmetric and so not representable as a problem).
struct NewtonOperator<'a> {
    matrix: Box<dyn Fn(&DVector<f64>) -> Result<DMatrix<f64>> + 'a>,
    jacobian: Box<dyn Fn(&DVector<f64>) -> Result<DMatrix<f64>> + 'a>,
    scale: Box<dyn Fn(&DVector<f64>) -> Result<f64> + 'a>,
}

fn newton_core(
    op: &NewtonOperator,
    lambda0: f64,
    v0: &DVector<f64>,
    opts: &SolveOptions,
) -> Result<(f64, DVector<f64>, f64, Vec<IterationRecord>)> {
    let n = v0.len();
    // Gauge (v^T v)/2 = 1: iterate at norm sqrt(2).
    let mut v = linalg::unit(v0)? * std::f64::consts::SQRT_2;
    let mut lambda = lambda0;
    let eta_of = |lambda: f64, v: &DVector<f64>| -> Result<f64> {
        let r = (op.matrix)(v)? * v - lambda * v;
        Ok(r.norm() / (op.scale)(v)?)
    };
    let initial_eta = eta_of(lambda, &v)?;
    let mut eta = initial_eta;
    let mut records = Vec::new();
    for iteration in 0..opts.max_iter {
        if eta <= opts.tol {
            return Ok((lambda, v, initial_eta, records));
        }
        let a = (op.matrix)(&v)?;
        let j = (op.jacobian)(&v)?;
        let jf = spectral::augmented_from_jacobian(&j, lambda, &v);
        let mut rhs = DVector::zeros(n + 1);
        let r = &a * &v - lambda * &v;
        rhs.rows_mut(0, n).copy_from(&(-&r));
        rhs[n] = -(2.0 - v.dot(&v)) / 2.0;
        let step = jf
            .lu()
            .solve(&rhs)
            .ok_or(Error::SingularJacobian { iteration })?;
        if !step.iter().all(|x| x.is_finite()) {
            return Err(Error::SingularJacobian { iteration });
        }
        v += step.rows(0, n) * opts.damping;
        lambda += opts.damping * step[n];
        eta = eta_of(lambda, &v)?;
        records.push(IterationRecord {
            eta,
            step_norm: opts.damping * step.norm(),
        });
    }
    if eta <= opts.tol {
        return Ok((lambda, v, initial_eta, records));
    }
    Err(Error::MaxIterExceeded {
        iterations: opts.max_iter,
        last_eta: eta,
    })
}

/// Newton's method on the augmented system from the given starting pair.
///
/// Converges quadratically near any eigenpair whose eigenvalue is simple;
/// fails with [`Error::SingularJacobian`] when the augmented matrix cannot
/// be factored, which is the typical failure mode when marching into a fold.
pub fn newton_solve(
    problem: &SpmfProblem,
    lambda0: f64,
    v0: &DVector<f64>,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let op = NewtonOperator {
        matrix: Box::new(|v| problem.matrix(v)),
        jacobian: Box::new(|v| problem.jacobian(v)),
        scale: Box::new(|v| Ok(problem.perturbation_scale(v)? * v.norm())),
    };
    let (lambda, v, initial_eta, iterations) = newton_core(&op, lambda0, v0, opts)?;
    Ok(SolveReport {
        eigenpair: Eigenpair::new(problem, lambda, &v)?,
        initial_eta,
        iterations,
    })
}

/// Self-consistent-field iteration: diagonalize `A(v_k)`, keep the selected
/// eigenpair, repeat. The eigenvalue reported each step is the Rayleigh
/// quotient, which minimizes the backward error for the current vector.
/// `damping < 1` mixes the new vector with the old one, which can stabilize
/// oscillating iterations.
pub fn scf_solve(
    problem: &SpmfProblem,
    selector: Selector,
    v0: &DVector<f64>,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let mut v = linalg::unit(v0)?;
    let (initial_eta, _) = backward_error::eigenvector_backward_error(problem, &v)?;
    let mut eta = initial_eta;
    let mut records = Vec::new();
    for _ in 0..opts.max_iter {
        let eig = nalgebra::SymmetricEigen::new(problem.matrix(&v)?);
        let pick = selector.pick(&eig.eigenvalues);
        let mut next = eig.eigenvectors.column(pick).into_owned();
        if next.dot(&v) < 0.0 {
            next.neg_mut();
        }
        if opts.damping < 1.0 {
            next = linalg::unit(&(&next * opts.damping + &v * (1.0 - opts.damping)))?;
        }
        let step_norm = (&next - &v).norm();
        v = next;
        let (e, lambda) = backward_error::eigenvector_backward_error(problem, &v)?;
        eta = e;
        records.push(IterationRecord { eta, step_norm });
        if eta <= opts.tol {
            return Ok(SolveReport {
                eigenpair: Eigenpair::new(problem, lambda, &v)?,
                initial_eta,
                iterations: records,
            });
        }
    }
    Err(Error::MaxIterExceeded {
        iterations: opts.max_iter,
        last_eta: eta,
    })
}

/// A converged eigenpair of a perturbed problem, with the perturbed residual.
#[derive(Debug, Clone)]
pub struct PerturbedSolve {
    /// Eigenvalue of the perturbed problem.
    pub lambda: f64,
    /// Unit eigenvector of the perturbed problem.
    pub vector: DVector<f64>,
    /// Residual norm of the pair under the perturbed matrices.
    pub residual_norm: f64,
    /// Backward error of the starting guess, measured with the original
    /// weights.
    pub initial_eta: f64,
    /// Per-step history.
    pub iterations: Vec<IterationRecord>,
}

/// Newton's method on the problem with term matrices `A_i + epsilon E_i`,
/// keeping the coefficient functions and the weights of the original
/// problem. The direction matrices may be nonsymmetric.
///
/// This is how condition-number predictions are checked: solve at a small
/// `epsilon`, compare `(lambda(eps) - lambda) / eps` against the sensitivity.
pub fn solve_perturbed(
    problem: &SpmfProblem,
    epsilon: f64,
    direction: &PerturbationDirection,
    lambda0: f64,
    v0: &DVector<f64>,
    opts: &SolveOptions,
) -> Result<PerturbedSolve> {
    if direction.len() != problem.term_count() {
        return Err(Error::InvalidProblem(format!(
            "direction has {} matrices for a problem with {} terms",
            direction.len(),
            problem.term_count()
        )));
    }
    let matrix = |v: &DVector<f64>| -> Result<DMatrix<f64>> {
        let mut a = problem.matrix(v)?;
        let f = problem.coefficient_values(v)?;
        for (fi, e) in f.iter().zip(direction.matrices()) {
            a += (epsilon * fi) * e;
        }
        Ok(a)
    };
    let jacobian = |v: &DVector<f64>| -> Result<DMatrix<f64>> {
        let mut j = problem.jacobian(v)?;
        let f = problem.coefficient_values(v)?;
        for ((fi, e), term) in f.iter().zip(direction.matrices()).zip(problem.terms()) {
            let g = term.coefficient().gradient(v)?;
            j += (epsilon * fi) * e;
            j += epsilon * (e * v) * g.transpose();
        }
        Ok(j)
    };
    let op = NewtonOperator {
        matrix: Box::new(matrix),
        jacobian: Box::new(jacobian),
        scale: Box::new(|v| Ok(problem.perturbation_scale(v)? * v.norm())),
    };
    let (lambda, v, initial_eta, iterations) = newton_core(&op, lambda0, v0, opts)?;
    let vhat = linalg::unit(&v)?;
    let residual_norm = ((op.matrix)(&vhat)? * &vhat - lambda * &vhat).norm();
    Ok(PerturbedSolve {
        lambda,
        vector: vhat,
        residual_norm,
        initial_eta,
        iterations,
    })
}

/// Finds every eigenpair of a problem whose coefficients are constants
/// except for exactly one rational-quadratic term.
///
/// Writing `t` for the value of that coefficient, any eigenpair solves the
/// frozen linear problem `M(t) w = mu w` with `M(t) = sum_j c_j A_j + t
/// A_rq`, subject to the consistency condition `t = w^T B w / w^T w`. The
/// value of the coefficient along any eigenvector lies in the Rayleigh range
/// of `B`, so scanning `t` over `[lambda_min(B), lambda_max(B)]`, following
/// each sorted eigenbranch of `M(t)`, and locating sign changes of the
/// consistency defect finds every solution; each root is polished by Newton
/// and deduplicated. `grid` is the number of scan points (1000 is plenty for
/// small problems; more separates close crossings).
pub fn enumerate_eigenpairs(problem: &SpmfProblem, grid: usize) -> Result<Vec<Eigenpair>> {
    if grid < 2 {
        return Err(Error::InvalidSamples);
    }
    let n = problem.dim();
    let mut constant_part = DMatrix::zeros(n, n);
    let mut scan: Option<(usize, &DMatrix<f64>)> = None;
    for (i, term) in problem.terms().iter().enumerate() {
        match term.coefficient() {
            Coefficient::Constant(c) => constant_part += term.matrix() * *c,
            Coefficient::RationalQuadratic(b) if scan.is_none() => scan = Some((i, b)),
            _ => return Err(Error::NotApplicable),
        }
    }
    let Some((scan_index, b)) = scan else {
        return Err(Error::NotApplicable);
    };
    let a_scan = problem.terms()[scan_index].matrix().clone();

    let b_eigen = nalgebra::SymmetricEigen::new(b.clone());
    let t_lo = b_eigen.eigenvalues.min();
    let t_hi = b_eigen.eigenvalues.max();

    // Consistency defect of the k-th sorted eigenbranch at t.
    let defect = |t: f64| -> (Vec<f64>, Vec<DVector<f64>>) {
        let eig = nalgebra::SymmetricEigen::new(&constant_part + t * &a_scan);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut defects = Vec::with_capacity(n);
        let mut vectors = Vec::with_capacity(n);
        for &k in &order {
            let w = eig.eigenvectors.column(k).into_owned();
            defects.push(w.dot(&(b * &w)) / w.dot(&w) - t);
            vectors.push(w);
        }
        (defects, vectors)
    };

    let ts: Vec<f64> = (0..grid)
        .map(|i| t_lo + (t_hi - t_lo) * (i as f64) / ((grid - 1) as f64))
        .collect();
    let mut previous = defect(ts[0]);
    let mut found: Vec<Eigenpair> = Vec::new();
    let opts = SolveOptions::default();
    for window in ts.windows(2) {
        let current = defect(window[1]);
        for k in 0..n {
            let (g0, g1) = (previous.0[k], current.0[k]);
            if g0 == 0.0 || g0 * g1 < 0.0 {
                // Bisect the sign change, then let Newton decide whether a
                // genuine eigenpair lives here (branch switches at linear
                // eigenvalue crossings produce spurious sign changes).
                let (mut lo, mut hi) = (window[0], window[1]);
                let mut g_lo = g0;
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let g_mid = defect(mid).0[k];
                    if g_lo * g_mid <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        g_lo = g_mid;
                    }
                }
                let t_root = 0.5 * (lo + hi);
                let at_root = defect(t_root);
                let w = &at_root.1[k];
                let lambda_guess = {
                    let m = &constant_part + t_root * &a_scan;
                    w.dot(&(m * w)) / w.dot(w)
                };
                if let Ok(report) = newton_solve(problem, lambda_guess, w, &opts) {
                    push_unique(&mut found, report.eigenpair);
                }
            }
        }
        previous = current;
    }
    found.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(found)
}

/// Keeps `pair` unless an equivalent eigenpair (same eigenvalue, parallel
/// eigenvector) is already present.
fn push_unique(found: &mut Vec<Eigenpair>, pair: Eigenpair) {
    let duplicate = found.iter().any(|q| {
        (q.lambda - pair.lambda).abs() <= 1e-8 * (1.0 + pair.lambda.abs())
            && q.vector.dot(&pair.vector).abs() >= 1.0 - 1e-8
    });
    if !duplicate {
        found.push(pair);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::WeightPolicy;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector};

    fn two_term() -> SpmfProblem {
        let a0 = dmatrix![1.0, 1.0, 1.0; 1.0, -2.0, -2.0; 1.0, -2.0, 0.0];
        let a1 = dmatrix![0.0, 1.0, 0.0; 1.0, 2.0, -1.0; 0.0, -1.0, 5.0];
        let b = dmatrix![0.0, -1.0, 2.0; -1.0, 2.0, 1.0; 2.0, 1.0, 1.0];
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
    fn newton_converges_quadratically_on_a_linear_problem() {
        let a = dmatrix![2.0, 1.0; 1.0, 3.0];
        let p = SpmfProblem::new(
            vec![(a, Coefficient::Constant(1.0))],
            WeightPolicy::Relative,
        )
        .unwrap();
        let report = newton_solve(&p, 3.5, &dvector![0.5, 1.0], &SolveOptions::default()).unwrap();
        let exact = (5.0 + 5.0_f64.sqrt()) / 2.0;
        assert_relative_eq!(report.eigenpair.lambda, exact, max_relative = 1e-12);
        assert!(report.eigenpair.residual_norm <= 1e-12);
        assert!(report.iterations.len() <= 8);
    }

    #[test]
    fn newton_solves_the_nonlinear_two_term_problem() {
        let p = two_term();
        let pairs = enumerate_eigenpairs(&p, 800).unwrap();
        assert!(!pairs.is_empty());
        for pair in &pairs {
            let eta = backward_error::backward_error(&p, pair.lambda, &pair.vector).unwrap();
            assert!(eta <= 1e-12, "eta = {eta} at lambda = {}", pair.lambda);
        }
        // Eigenvalues are distinct and sorted.
        for w in pairs.windows(2) {
            assert!(w[0].lambda < w[1].lambda);
        }
    }

    #[test]
    fn scf_reaches_an_eigenpair_of_the_two_term_problem() {
        let p = two_term();
        let opts = SolveOptions {
            max_iter: 300,
            tol: 1e-12,
            damping: 1.0,
        };
        let report = scf_solve(&p, Selector::Largest, &dvector![1.0, 0.2, 0.1], &opts).unwrap();
        let eta =
            backward_error::backward_error(&p, report.eigenpair.lambda, &report.eigenpair.vector)
                .unwrap();
        assert!(eta <= 1e-12);
    }

    #[test]
    fn perturbed_solve_tracks_the_eigenvalue_sensitivity() {
        use crate::conditioning;
        let p = two_term();
        let pairs = enumerate_eigenpairs(&p, 800).unwrap();
        let pair = &pairs[0];
        let d = conditioning::optimal_eigenvalue_perturbation(
            &p,
            pair.lambda,
            &pair.vector,
            true,
            crate::linalg::MatrixNorm::Spectral,
        )
        .unwrap();
        let predicted =
            conditioning::eigenvalue_sensitivity(&p, pair.lambda, &pair.vector, &d).unwrap();
        let eps = 1e-6;
        let solved = solve_perturbed(
            &p,
            eps,
            &d,
            pair.lambda,
            &pair.vector,
            &SolveOptions::default(),
        )
        .unwrap();
        let observed = (solved.lambda - pair.lambda) / eps;
        assert_relative_eq!(observed, predicted, max_relative = 1e-4);
    }

    #[test]
    fn max_iter_is_reported_with_the_last_eta() {
        let p = two_term();
        let opts = SolveOptions {
            max_iter: 1,
            tol: 1e-16,
            damping: 1.0,
        };
        match newton_solve(&p, 10.0, &dvector![1.0, 1.0, 1.0], &opts) {
            Err(Error::MaxIterExceeded { iterations, last_eta }) => {
                assert_eq!(iterations, 1);
                assert!(last_eta > 1e-16);
            }
            other => panic!("expected MaxIterExceeded, got {other:?}"),
        }
    }

    #[test]
    fn enumeration_rejects_unsupported_shapes() {
        let a = DMatrix::identity(2, 2);
        let p = SpmfProblem::new(
            vec![(a, Coefficient::Constant(1.0))],
            WeightPolicy::Relative,
        )
        .unwrap();
        assert!(matches!(
            enumerate_eigenpairs(&p, 100),
            Err(Error::NotApplicable)
        ));
    }
}
