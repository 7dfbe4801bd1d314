//! Ready-made problem families and study drivers: a scalable family with
//! arbitrarily ill-conditioned eigenvalues, a small family with folds and
//! branch structure, random problems, and a Monte Carlo check of the
//! condition-number bound.

use nalgebra::{DMatrix, DVector};
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::coefficient::Coefficient;
use crate::conditioning::{self, ConditionMode, PerturbationDirection};
use crate::continuation::{self, Branch, BranchData, ContinuationOptions, TurningPoint};
use crate::error::{Error, Result};
use crate::linalg::{self, MatrixNorm};
use crate::problem::{SpmfProblem, WeightPolicy};
use crate::solvers;
use crate::spectral;

/// Target Jacobian of the ill-conditioned family: diagonal `n, n-1, ..., 1`
/// with every superdiagonal entry equal to `n`. Its eigenvalues are `1..n`,
/// all simple, yet the left and right eigenvectors of the larger ones are
/// nearly orthogonal, so eigenvalue condition numbers grow like `n!`-ish
/// factors: about `3.4e12` already at `n = 30`.
#[must_use]
pub fn wilkinson_matrix(n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        w[(i, i)] = (n - i) as f64;
        if i + 1 < n {
            w[(i, i + 1)] = n as f64;
        }
    }
    w
}

/// A problem of `n` terms whose Jacobian at the eigenpair `(n, e_1)` is
/// exactly [`wilkinson_matrix`].
///
/// The construction places rational-quadratic coefficients so that each
/// gradient contributes one superdiagonal entry: term `k >= 1` couples the
/// symmetric pair matrix `e_1 e_k^T + e_k e_1^T` with the coefficient
/// `v^T B_k v / v^T v`, `B_k` carrying `1` at `(1,1)` and `n/2` at
/// `(1, k+1)` and `(k+1, 1)`. At `v = e_1` every coefficient equals one and
/// the constant term is chosen to make `A(e_1)` the diagonal part. All
/// entries involved are small integers (or halves), so the identity
/// `J(e_1) = W_n` holds exactly in floating point.
pub fn wilkinson_problem(n: usize) -> Result<SpmfProblem> {
    if n < 2 {
        return Err(Error::InvalidProblem(
            "the family needs dimension at least two".into(),
        ));
    }
    let nf = n as f64;
    let mut coupling_sum = DMatrix::zeros(n, n);
    let mut terms: Vec<(DMatrix<f64>, Coefficient)> = Vec::with_capacity(n);
    terms.push((DMatrix::zeros(n, n), Coefficient::Constant(1.0)));
    for k in 0..n - 1 {
        let mut a = DMatrix::zeros(n, n);
        if k == 0 {
            a[(0, 0)] = 1.0;
        } else {
            a[(0, k)] = 1.0;
            a[(k, 0)] = 1.0;
        }
        coupling_sum += &a;
        let mut b = DMatrix::zeros(n, n);
        b[(0, 0)] = 1.0;
        b[(0, k + 1)] = nf / 2.0;
        b[(k + 1, 0)] = nf / 2.0;
        terms.push((a, Coefficient::rational_quadratic(b)?));
    }
    let mut diagonal = DMatrix::zeros(n, n);
    for i in 0..n {
        diagonal[(i, i)] = (n - i) as f64;
    }
    terms[0].0 = diagonal - coupling_sum;
    SpmfProblem::new(terms, WeightPolicy::Relative)
}

/// Unit-norm left eigenvector of [`wilkinson_matrix`] for its largest
/// eigenvalue `n`, from the closed form `u_j proportional to
/// n^(j-1) / (j-1)!`.
#[must_use]
pub fn wilkinson_left_eigenvector(n: usize) -> DVector<f64> {
    let mut u = DVector::zeros(n);
    let mut term = 1.0;
    for j in 0..n {
        u[j] = term;
        term *= n as f64 / (j + 1) as f64;
    }
    let norm = u.norm();
    u / norm
}

/// One row of the ill-conditioning survey.
#[derive(Debug, Clone, Copy)]
pub struct WilkinsonRow {
    /// Problem dimension.
    pub n: usize,
    /// Relative eigenvalue condition number at the eigenpair `(n, e_1)`.
    pub kappa: f64,
    /// Alignment `|u^T v|` of the unit left and right eigenvectors.
    pub u_dot_v: f64,
    /// Weighted coefficient sum `alpha = sum_i |f_i| w_i` at `e_1`.
    pub alpha: f64,
}

/// Surveys the family at the given dimensions. Everything is evaluated at
/// the exactly known eigenpair `(n, e_1)`, so the numbers isolate the
/// conditioning formulas from any solver error.
pub fn wilkinson_report(ns: &[usize]) -> Result<Vec<WilkinsonRow>> {
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let problem = wilkinson_problem(n)?;
        let e1 = DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let lambda = n as f64;
        let kappa = conditioning::eigenvalue_condition(&problem, lambda, &e1, ConditionMode::Relative)?;
        let j = problem.jacobian(&e1)?;
        let u = spectral::left_eigenvector(&j, lambda, spectral::EIGENVALUE_MATCH_TOL)?;
        rows.push(WilkinsonRow {
            n,
            kappa,
            u_dot_v: u.dot(&e1).abs(),
            alpha: problem.perturbation_scale(&e1)?,
        });
    }
    Ok(rows)
}

/// The two-term family `A_0(delta) + (v^T B v / v^T v) A_1` whose branch
/// diagram over `delta in [-5, 0]` has five coexisting eigenpairs between
/// two folds, and three outside.
pub fn bifurcation_problem(delta: f64) -> Result<SpmfProblem> {
    let a0 = DMatrix::from_row_slice(
        3,
        3,
        &[1.0 + delta, 1.0, 1.0, 1.0, -2.0, -2.0, 1.0, -2.0, 0.0],
    );
    let a1 = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 2.0, -1.0, 0.0, -1.0, 5.0]);
    let b = DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 2.0, -1.0, 2.0, 1.0, 2.0, 1.0, 1.0]);
    SpmfProblem::new(
        vec![
            (a0, Coefficient::Constant(1.0)),
            (a1, Coefficient::rational_quadratic(b)?),
        ],
        WeightPolicy::Relative,
    )
}

/// Number of evenly spaced checkpoints a sweep seeds branches from.
const SWEEP_CHECKPOINTS: usize = 9;

/// Scan resolution for the checkpoint enumeration.
const SWEEP_SCAN_GRID: usize = 1200;

/// Agreement thresholds for deciding that a freshly enumerated eigenpair is
/// already covered by a continued branch.
const COVER_LAMBDA_TOL: f64 = 1e-6;
const COVER_ANGLE_TOL: f64 = 1e-6;

/// Folds closer than this in `delta` are the same fold.
const FOLD_MERGE_TOL: f64 = 1e-6;

/// Sweeps [`bifurcation_problem`] over `[delta_min, delta_max]` with `steps`
/// uniform steps, returning every branch, fold, and the grid itself.
///
/// Branches are discovered by exhaustively enumerating eigenpairs at a few
/// checkpoint parameters ([`solvers::enumerate_eigenpairs`]) and continuing
/// every pair not already covered in both directions. Relying on
/// continuation alone from one end would miss the branches that exist only
/// between the folds; relying on enumeration alone would miss the fold
/// refinement. Branch segments end at folds; the two arms meeting at a fold
/// are reported as separate branches, and the fold once.
pub fn bifurcation_sweep(delta_min: f64, delta_max: f64, steps: usize) -> Result<BranchData> {
    branch_sweep(&bifurcation_problem, delta_min, delta_max, steps)
}

/// [`bifurcation_sweep`] for an arbitrary one-parameter family with a single
/// non-constant (rational-quadratic) coefficient.
pub fn branch_sweep<F>(
    family: &F,
    delta_min: f64,
    delta_max: f64,
    steps: usize,
) -> Result<BranchData>
where
    F: Fn(f64) -> Result<SpmfProblem>,
{
    if steps < 2 || !(delta_max > delta_min) {
        return Err(Error::InvalidSamples);
    }
    let grid: Vec<f64> = (0..=steps)
        .map(|i| delta_min + (delta_max - delta_min) * (i as f64) / (steps as f64))
        .collect();
    let opts = ContinuationOptions::default();

    let checkpoint_count = SWEEP_CHECKPOINTS.min(grid.len());
    let checkpoint_indices: Vec<usize> = (0..checkpoint_count)
        .map(|j| j * steps / (checkpoint_count - 1).max(1))
        .collect();

    let mut branches: Vec<Branch> = Vec::new();
    let mut folds: Vec<TurningPoint> = Vec::new();
    let h = (delta_max - delta_min) / steps as f64;

    for &ci in &checkpoint_indices {
        let delta_c = grid[ci];
        let problem = family(delta_c)?;
        let pairs = solvers::enumerate_eigenpairs(&problem, SWEEP_SCAN_GRID)?;
        for pair in &pairs {
            if covered(&branches, delta_c, pair.lambda, &pair.vector, h) {
                continue;
            }
            let mut merged = Branch::default();
            // Leftward half, reversed into ascending order. When a right
            // half follows, the checkpoint point is dropped here and
            // re-added there.
            if ci > 0 {
                let left: Vec<f64> = grid[..=ci].iter().rev().copied().collect();
                let run =
                    continuation::continue_branch(family, &left, pair.lambda, &pair.vector, &opts)?;
                if let Some(fold) = run.turning_point {
                    folds.push(fold);
                }
                merged.points.extend(run.branch.points.into_iter().rev());
                if ci < steps {
                    merged.points.pop();
                }
            }
            if ci < steps {
                let right = &grid[ci..];
                let run =
                    continuation::continue_branch(family, right, pair.lambda, &pair.vector, &opts)?;
                if let Some(fold) = run.turning_point {
                    folds.push(fold);
                }
                merged.points.extend(run.branch.points);
            }
            if !merged.points.is_empty() {
                branches.push(merged);
            }
        }
    }

    branches.sort_by(|a, b| {
        let la = a.points.first().map_or(f64::INFINITY, |p| p.lambda);
        let lb = b.points.first().map_or(f64::INFINITY, |p| p.lambda);
        la.total_cmp(&lb)
    });

    let mut unique_folds: Vec<TurningPoint> = Vec::new();
    folds.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    for fold in folds {
        if unique_folds
            .iter()
            .all(|f| (f.delta - fold.delta).abs() > FOLD_MERGE_TOL)
        {
            unique_folds.push(fold);
        }
    }

    Ok(BranchData {
        deltas: grid,
        branches,
        turning_points: unique_folds,
    })
}

/// Whether some branch already holds this eigenpair at (or next to) the
/// given parameter value.
fn covered(
    branches: &[Branch],
    delta: f64,
    lambda: f64,
    vector: &DVector<f64>,
    h: f64,
) -> bool {
    branches.iter().any(|branch| {
        branch.points.iter().any(|p| {
            (p.delta - delta).abs() <= 0.51 * h
                && (p.lambda - lambda).abs() <= COVER_LAMBDA_TOL * (1.0 + lambda.abs())
                && p.vector.dot(vector).abs() >= 1.0 - COVER_ANGLE_TOL
        })
    })
}

/// Outcome of stress-testing a condition number against random admissible
/// perturbation directions.
#[derive(Debug, Clone)]
pub struct MonteCarloReport {
    /// Number of random directions drawn.
    pub samples: usize,
    /// Seed the directions were drawn from.
    pub seed: u64,
    /// Whether directions were restricted to symmetric matrices.
    pub symmetric: bool,
    /// Norm the per-term budget was measured in.
    pub norm: MatrixNorm,
    /// The class condition number (absolute scale) every sample is compared
    /// against.
    pub kappa_absolute: f64,
    /// Largest first-order eigenvalue change over the random directions.
    pub max_sensitivity: f64,
    /// `max_sensitivity / kappa_absolute`; at most one up to rounding.
    pub max_ratio: f64,
    /// First-order change along the analytically optimal direction.
    pub attained_sensitivity: f64,
    /// `attained_sensitivity / kappa_absolute`; one up to rounding.
    pub attained_ratio: f64,
    /// Perturbation size used for the nonlinear re-solve check, if any.
    pub epsilon: Option<f64>,
    /// Largest `|lambda(eps) - lambda| / (eps kappa)` over re-solved
    /// directions; close to `max_ratio` for small `eps`.
    pub max_solved_ratio: Option<f64>,
}

/// Draws `samples` random directions of the requested class, compares their
/// first-order eigenvalue change against the class condition number, and
/// optionally re-solves the perturbed problem at size `epsilon` for the
/// first few directions to confirm the prediction beyond first order.
///
/// Random matrices are Gaussian (symmetrized for the symmetric class) and
/// rescaled to sit exactly on the budget `||E_i|| = w_i`, where the bound is
/// tight.
pub fn monte_carlo_condition_check(
    problem: &SpmfProblem,
    lambda: f64,
    v: &DVector<f64>,
    samples: usize,
    seed: u64,
    symmetric: bool,
    norm: MatrixNorm,
    epsilon: Option<f64>,
) -> Result<MonteCarloReport> {
    if samples == 0 {
        return Err(Error::InvalidSamples);
    }
    let kappa_plain =
        conditioning::eigenvalue_condition(problem, lambda, v, ConditionMode::Absolute)?;
    let kappa_absolute = match (symmetric, norm) {
        (true, MatrixNorm::Frobenius) => {
            let (_, fro) = conditioning::eigenvalue_condition_symmetric(
                problem,
                lambda,
                v,
                ConditionMode::Absolute,
            )?;
            fro
        }
        _ => kappa_plain,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = problem.dim();
    let mut max_sensitivity = 0.0_f64;
    let mut solve_directions: Vec<PerturbationDirection> = Vec::new();
    let opts = solvers::SolveOptions::default();
    for _ in 0..samples {
        let matrices: Vec<DMatrix<f64>> = problem
            .weights()
            .iter()
            .map(|&w| random_direction_matrix(&mut rng, n, w, symmetric, norm))
            .collect();
        let direction = PerturbationDirection::new(matrices, symmetric, norm, problem.weights())?;
        let s = conditioning::eigenvalue_sensitivity(problem, lambda, v, &direction)?.abs();
        max_sensitivity = max_sensitivity.max(s);
        if epsilon.is_some() && solve_directions.len() < 8 {
            solve_directions.push(direction);
        }
    }

    let optimal = conditioning::optimal_eigenvalue_perturbation(problem, lambda, v, symmetric, norm)?;
    let attained_sensitivity =
        conditioning::eigenvalue_sensitivity(problem, lambda, v, &optimal)?.abs();

    let max_solved_ratio = match epsilon {
        None => None,
        Some(eps) => {
            solve_directions.push(optimal);
            let mut worst = 0.0_f64;
            for direction in &solve_directions {
                let solved = solvers::solve_perturbed(problem, eps, direction, lambda, v, &opts)?;
                worst = worst.max((solved.lambda - lambda).abs() / (eps * kappa_absolute));
            }
            Some(worst)
        }
    };

    Ok(MonteCarloReport {
        samples,
        seed,
        symmetric,
        norm,
        kappa_absolute,
        max_sensitivity,
        max_ratio: max_sensitivity / kappa_absolute,
        attained_sensitivity,
        attained_ratio: attained_sensitivity / kappa_absolute,
        epsilon,
        max_solved_ratio,
    })
}

fn random_direction_matrix(
    rng: &mut ChaCha8Rng,
    n: usize,
    weight: f64,
    symmetric: bool,
    norm: MatrixNorm,
) -> DMatrix<f64> {
    if weight == 0.0 {
        return DMatrix::zeros(n, n);
    }
    loop {
        let mut e = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        if symmetric {
            e = linalg::symmetric_part(&e);
        }
        let size = norm.of(&e);
        if size > 0.0 {
            return e * (weight / size);
        }
    }
}

/// A reproducible random problem: one constant term and `m - 1`
/// rational-quadratic terms, all matrices Gaussian symmetric.
pub fn random_problem(n: usize, m: usize, seed: u64) -> Result<SpmfProblem> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidProblem(
            "dimension and term count must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaussian_symmetric = |scale: f64| -> DMatrix<f64> {
        let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        linalg::symmetric_part(&g) * scale
    };
    let mut terms: Vec<(DMatrix<f64>, Coefficient)> = Vec::with_capacity(m);
    terms.push((gaussian_symmetric(1.0), Coefficient::Constant(1.0)));
    for _ in 1..m {
        let a = gaussian_symmetric(1.0);
        let b = gaussian_symmetric(1.0);
        terms.push((a, Coefficient::rational_quadratic(b)?));
    }
    SpmfProblem::new(terms, WeightPolicy::Relative)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn jacobian_at_the_seed_is_exactly_the_target_matrix() {
        for n in [2, 3, 5, 8, 13, 30] {
            let p = wilkinson_problem(n).unwrap();
            let e1 = DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.0 });
            let j = p.jacobian(&e1).unwrap();
            assert_eq!(j, wilkinson_matrix(n), "n = {n}");
            // (n, e_1) is an exact eigenpair.
            let r = spectral::residual(&p, n as f64, &e1).unwrap();
            assert_eq!(r.norm(), 0.0);
        }
    }

    #[test]
    fn survey_matches_the_known_middle_row() {
        let rows = wilkinson_report(&[5]).unwrap();
        let row = rows[0];
        assert_relative_eq!(row.kappa, 67.74, max_relative = 5e-3);
        assert_relative_eq!(row.u_dot_v, 2.779e-2, max_relative = 5e-3);
        assert_relative_eq!(row.alpha, 9.414, max_relative = 5e-3);
    }

    #[test]
    fn closed_form_left_eigenvector_matches_the_computed_one() {
        for n in [5, 12, 30] {
            let w = wilkinson_matrix(n);
            let u = spectral::left_eigenvector(&w, n as f64, spectral::EIGENVALUE_MATCH_TOL)
                .unwrap();
            let closed = wilkinson_left_eigenvector(n);
            let cos = u.dot(&closed).abs();
            assert!(cos >= 1.0 - 1e-12, "n = {n}: cos = {cos}");
        }
    }

    #[test]
    fn sweep_finds_all_branches_folds_and_the_zero_crossing() {
        let data = bifurcation_sweep(-5.0, 0.0, 200).unwrap();
        assert_eq!(data.branches.len(), 5, "branch count");
        assert_eq!(data.turning_points.len(), 2, "fold count");
        let mut deltas: Vec<f64> = data.turning_points.iter().map(|f| f.delta).collect();
        deltas.sort_by(f64::total_cmp);
        assert_relative_eq!(deltas[0], -3.904_419_85, epsilon = 1e-4);
        assert_relative_eq!(deltas[1], -1.346_187_17, epsilon = 1e-4);
        let crossings = data.zero_crossings();
        assert!(
            crossings
                .iter()
                .any(|c| (c - -1.730_062).abs() <= 5e-3),
            "crossings: {crossings:?}"
        );
    }

    #[test]
    fn monte_carlo_bound_holds_and_is_attained() {
        let p = bifurcation_problem(0.0).unwrap();
        let pairs = solvers::enumerate_eigenpairs(&p, 600).unwrap();
        let pair = &pairs[0];
        for (symmetric, norm) in [
            (false, MatrixNorm::Spectral),
            (true, MatrixNorm::Spectral),
            (true, MatrixNorm::Frobenius),
        ] {
            let report = monte_carlo_condition_check(
                &p,
                pair.lambda,
                &pair.vector,
                60,
                7,
                symmetric,
                norm,
                None,
            )
            .unwrap();
            assert!(
                report.max_ratio <= 1.0 + 1e-10,
                "bound violated: {}",
                report.max_ratio
            );
            assert_relative_eq!(report.attained_ratio, 1.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn random_problems_are_reproducible() {
        let a = random_problem(6, 3, 42).unwrap();
        let b = random_problem(6, 3, 42).unwrap();
        let v = DVector::from_element(6, 1.0);
        assert_eq!(a.matrix(&v).unwrap(), b.matrix(&v).unwrap());
        let c = random_problem(6, 3, 43).unwrap();
        assert_ne!(a.matrix(&v).unwrap(), c.matrix(&v).unwrap());
    }
}
