//! Parameter continuation of eigenpair branches, with fold detection.
//!
//! Given a family of problems indexed by a real parameter `delta`, a branch
//! is continued by marching over a grid, using the previous eigenpair as the
//! Newton starting guess for the next parameter value. Each accepted point
//! records the eigenvalue condition number, so sweeps double as conditioning
//! surveys.
//!
//! Two events end a branch before the grid does. Newton may stop converging,
//! which is the signature of a fold: the branch turns around at some
//! `delta_0` inside the current step and the eigenvalue collides with a
//! second one there. Or Newton may converge to a vector far from the
//! previous one, meaning it jumped to a different branch; the point is
//! rejected and treated like a convergence failure. In both cases the fold
//! location is refined by bisection between the last good and the first bad
//! parameter, every probe that converges is appended to the branch (this is
//! what resolves the condition-number blowup `kappa ~ 1/sqrt(delta -
//! delta_0)`), and the turning point is estimated from the refined tail by a
//! quadratic fit of `delta` as a function of `lambda`.

use nalgebra::DVector;

use crate::conditioning::{self, ConditionMode};
use crate::error::{Error, Result};
use crate::problem::SpmfProblem;
use crate::solvers::{self, SolveOptions};

/// One accepted point of a continued branch.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    /// Parameter value.
    pub delta: f64,
    /// Eigenvalue there.
    pub lambda: f64,
    /// Unit eigenvector, sign-aligned along the branch.
    pub vector: DVector<f64>,
    /// Relative eigenvalue condition number; infinite at an eigenvalue
    /// crossing zero and when the eigenvalue is not simple.
    pub kappa: f64,
    /// Whether the eigenvalue passed the simplicity check.
    pub simple: bool,
}

/// A maximal run of points continued from one seed.
#[derive(Debug, Clone, Default)]
pub struct Branch {
    /// Points in marching order.
    pub points: Vec<BranchPoint>,
}

impl Branch {
    /// Parameter values where the eigenvalue changes sign, by linear
    /// interpolation between adjacent points.
    #[must_use]
    pub fn zero_crossings(&self) -> Vec<f64> {
        let mut crossings = Vec::new();
        for w in self.points.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.lambda == 0.0 {
                crossings.push(a.delta);
            } else if a.lambda * b.lambda < 0.0 {
                let t = a.lambda / (a.lambda - b.lambda);
                crossings.push(a.delta + t * (b.delta - a.delta));
            }
        }
        crossings
    }
}

/// A fold: the parameter value past which a branch cannot be continued, with
/// the eigenvalue at the turn.
#[derive(Debug, Clone, Copy)]
pub struct TurningPoint {
    /// Estimated fold location.
    pub delta: f64,
    /// Estimated eigenvalue at the fold.
    pub lambda: f64,
}

/// Branches and folds collected over one parameter window.
#[derive(Debug, Clone, Default)]
pub struct BranchData {
    /// The marching grid the sweep ran on.
    pub deltas: Vec<f64>,
    /// All distinct branches found.
    pub branches: Vec<Branch>,
    /// All distinct folds found.
    pub turning_points: Vec<TurningPoint>,
}

impl BranchData {
    /// Zero crossings of every branch, sorted.
    #[must_use]
    pub fn zero_crossings(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .branches
            .iter()
            .flat_map(Branch::zero_crossings)
            .collect();
        all.sort_by(f64::total_cmp);
        all
    }
}

/// Controls for [`continue_branch`].
#[derive(Debug, Clone)]
pub struct ContinuationOptions {
    /// Newton settings used at every parameter value.
    pub solve: SolveOptions,
    /// Largest accepted jump between consecutive unit eigenvectors; larger
    /// steps are treated as a jump onto a different branch.
    pub max_vector_step: f64,
    /// Parameter resolution of the fold bisection.
    pub fold_resolution: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions::default(),
            max_vector_step: 0.5,
            fold_resolution: 1e-9,
        }
    }
}

/// The outcome of continuing one seed across a grid.
#[derive(Debug, Clone)]
pub struct ContinuedBranch {
    /// Accepted points, including fold-refinement probes.
    pub branch: Branch,
    /// Present when the branch ended at a fold inside the grid.
    pub turning_point: Option<TurningPoint>,
}

/// Marches an eigenpair branch across `deltas`, warm-starting Newton at each
/// step, and refines the fold if the branch ends inside the window.
///
/// `deltas` must be strictly monotone (either direction); the seed
/// `(lambda0, v0)` must converge at `deltas[0]`, otherwise the solver error
/// is returned unchanged.
pub fn continue_branch<F>(
    family: &F,
    deltas: &[f64],
    lambda0: f64,
    v0: &DVector<f64>,
    opts: &ContinuationOptions,
) -> Result<ContinuedBranch>
where
    F: Fn(f64) -> Result<SpmfProblem>,
{
    if deltas.len() < 2 {
        return Err(Error::InvalidSamples);
    }
    let monotone = deltas.windows(2).all(|w| w[1] > w[0])
        || deltas.windows(2).all(|w| w[1] < w[0]);
    if !monotone {
        return Err(Error::InvalidSamples);
    }

    let mut branch = Branch::default();
    let mut lambda = lambda0;
    let mut v = v0.clone();
    let mut stalled_at: Option<f64> = None;

    for (i, &delta) in deltas.iter().enumerate() {
        let problem = family(delta)?;
        match try_step(&problem, lambda, &v, &branch, opts) {
            Ok(mut point) => {
                point.delta = delta;
                lambda = point.lambda;
                v = point.vector.clone();
                branch.points.push(point);
            }
            Err(StepFailure::Fatal(e)) => return Err(e),
            Err(StepFailure::Lost(e)) => {
                if i == 0 {
                    // The seed itself does not converge; surface the solver
                    // error rather than returning an empty branch.
                    return Err(e);
                }
                stalled_at = Some(delta);
                break;
            }
        }
    }

    let turning_point = match stalled_at {
        Some(bad_delta) => Some(refine_fold(family, &mut branch, bad_delta, opts)?),
        None => None,
    };
    Ok(ContinuedBranch {
        branch,
        turning_point,
    })
}

enum StepFailure {
    /// Newton failed or left the branch; a fold may live here. Carries the
    /// underlying solver error for seeds that never converge.
    Lost(Error),
    /// A non-solver error that must propagate.
    Fatal(Error),
}

fn try_step(
    problem: &SpmfProblem,
    lambda: f64,
    v: &DVector<f64>,
    branch: &Branch,
    opts: &ContinuationOptions,
) -> std::result::Result<BranchPoint, StepFailure> {
    let report = match solvers::newton_solve(problem, lambda, v, &opts.solve) {
        Ok(r) => r,
        Err(e @ (Error::SingularJacobian { .. } | Error::MaxIterExceeded { .. })) => {
            return Err(StepFailure::Lost(e))
        }
        Err(e) => return Err(StepFailure::Fatal(e)),
    };
    let mut w = report.eigenpair.vector;
    if let Some(last) = branch.points.last() {
        if w.dot(&last.vector) < 0.0 {
            w.neg_mut();
        }
        if (&w - &last.vector).norm() > opts.max_vector_step {
            return Err(StepFailure::Lost(Error::InvalidProblem(
                "continuation step left the branch".into(),
            )));
        }
    }
    let (kappa, simple) = condition_at(problem, report.eigenpair.lambda, &w)
        .map_err(StepFailure::Fatal)?;
    Ok(BranchPoint {
        delta: f64::NAN, // caller fills the parameter value
        lambda: report.eigenpair.lambda,
        vector: w,
        kappa,
        simple,
    })
}

/// Relative eigenvalue condition number and simplicity flag, with the two
/// benign failure modes folded into the values: a zero eigenvalue has
/// infinite relative condition number, and a non-simple eigenvalue is
/// flagged and recorded as infinite.
fn condition_at(problem: &SpmfProblem, lambda: f64, v: &DVector<f64>) -> Result<(f64, bool)> {
    match conditioning::eigenvalue_condition(problem, lambda, v, ConditionMode::Relative) {
        Ok(kappa) => Ok((kappa, true)),
        Err(Error::ZeroEigenvalue) => Ok((f64::INFINITY, true)),
        Err(Error::NonSimple { .. }) => Ok((f64::INFINITY, false)),
        Err(e) => Err(e),
    }
}

/// Bisects between the last good parameter and `bad_delta`, appending every
/// converged probe to the branch, and estimates the turning point from the
/// refined tail.
fn refine_fold<F>(
    family: &F,
    branch: &mut Branch,
    bad_delta: f64,
    opts: &ContinuationOptions,
) -> Result<TurningPoint>
where
    F: Fn(f64) -> Result<SpmfProblem>,
{
    let last = branch
        .points
        .last()
        .expect("refinement runs only after at least one accepted point");
    let mut lo = last.delta;
    let mut hi = bad_delta;
    let mut lambda = last.lambda;
    let mut v = last.vector.clone();

    while (hi - lo).abs() > opts.fold_resolution {
        let mid = 0.5 * (lo + hi);
        let problem = family(mid)?;
        match try_step(&problem, lambda, &v, branch, opts) {
            Ok(mut point) => {
                point.delta = mid;
                lambda = point.lambda;
                v = point.vector.clone();
                branch.points.push(point);
                lo = mid;
            }
            Err(StepFailure::Lost(_)) => hi = mid,
            Err(StepFailure::Fatal(e)) => return Err(e),
        }
    }

    Ok(estimate_turning_point(branch, lo))
}

/// Quadratic fit of `delta` as a function of `lambda` through the last three
/// branch points; the vertex estimates the fold. Falls back to the last
/// accepted point when the tail is too short or the fit degenerates.
fn estimate_turning_point(branch: &Branch, fallback_delta: f64) -> TurningPoint {
    let m = branch.points.len();
    let last = &branch.points[m - 1];
    let fallback = TurningPoint {
        delta: fallback_delta,
        lambda: last.lambda,
    };
    if m < 3 {
        return fallback;
    }
    let tail = &branch.points[m - 3..];
    let (l0, l1, l2) = (tail[0].lambda, tail[1].lambda, tail[2].lambda);
    let (d0, d1, d2) = (tail[0].delta, tail[1].delta, tail[2].delta);
    // Divided differences for delta = a lambda^2 + b lambda + c.
    let denom01 = l1 - l0;
    let denom12 = l2 - l1;
    let denom02 = l2 - l0;
    if denom01 == 0.0 || denom12 == 0.0 || denom02 == 0.0 {
        return fallback;
    }
    let s01 = (d1 - d0) / denom01;
    let s12 = (d2 - d1) / denom12;
    let a = (s12 - s01) / denom02;
    if a.abs() <= f64::EPSILON * (1.0 + s12.abs().max(s01.abs())) {
        return fallback;
    }
    let b = s01 - a * (l0 + l1);
    let c = d0 - l0 * (a * l0 + b);
    let lambda_vertex = -b / (2.0 * a);
    let delta_vertex = c - b * b / (4.0 * a);
    // The fold must lie between the last converged and the first failed
    // parameter; a vertex outside that bracket means the fit ran on noise.
    let (near, far) = (fallback_delta, 2.0 * fallback_delta - tail[0].delta);
    if (delta_vertex - near).abs() > (far - near).abs().max(1e-6) {
        return fallback;
    }
    TurningPoint {
        delta: delta_vertex,
        lambda: lambda_vertex,
    }
}
