//! File formats: problems as JSON, vectors as plain text, surveys as CSV,
//! reports as JSON.
//!
//! # Problem files
//!
//! A problem is a JSON object:
//!
//! ```json
//! {
//!   "n": 3,
//!   "m": 2,
//!   "terms": [
//!     { "matrix": [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
//!       "function": { "kind": "constant", "value": 1.0 } },
//!     { "matrix": [0.0, 1.0, 0.0, 1.0, 2.0, -1.0, 0.0, -1.0, 5.0],
//!       "function": { "kind": "rational_quadratic",
//!                     "B": [0.0, -1.0, 2.0, -1.0, 2.0, 1.0, 2.0, 1.0, 1.0] } }
//!   ],
//!   "weights": "relative"
//! }
//! ```
//!
//! `n` is the dimension, `m` the number of terms (it must match the length
//! of `terms`), and every matrix is a flat row-major array of `n * n`
//! numbers. `function` is either `{"kind": "constant", "value": c}` or
//! `{"kind": "rational_quadratic", "B": [...]}` for `v^T B v / v^T v`.
//! `weights` is `"relative"` (per-term spectral norms, the default if the
//! field is missing), `"unit"`, or an explicit array of `m` nonnegative
//! numbers.
//!
//! Problems built in code around closures have no file representation;
//! saving one reports [`Error::Unserializable`].
//!
//! # Vector files
//!
//! One floating-point number per line; blank lines and surrounding
//! whitespace are ignored. Written numbers use the shortest representation
//! that round-trips.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::backward_error::{BackwardErrorReport, PerturbationClass};
use crate::coefficient::Coefficient;
use crate::conditioning::{ConditionReport, PerturbationDirection, Quantity};
use crate::continuation::BranchData;
use crate::error::{Error, Result};
use crate::experiments::{MonteCarloReport, WilkinsonRow};
use crate::linalg::MatrixNorm;
use crate::problem::{SpmfProblem, WeightPolicy};

#[derive(Serialize, Deserialize)]
struct ProblemFile {
    n: usize,
    m: usize,
    terms: Vec<TermFile>,
    #[serde(default)]
    weights: WeightsFile,
}

#[derive(Serialize, Deserialize)]
struct TermFile {
    matrix: Vec<f64>,
    function: FunctionFile,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FunctionFile {
    Constant {
        value: f64,
    },
    RationalQuadratic {
        #[serde(rename = "B")]
        b: Vec<f64>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WeightsFile {
    Policy(String),
    Fixed(Vec<f64>),
}

impl Default for WeightsFile {
    fn default() -> Self {
        WeightsFile::Policy("relative".into())
    }
}

fn matrix_from_flat(n: usize, flat: &[f64], what: &str) -> Result<DMatrix<f64>> {
    if flat.len() != n * n {
        return Err(Error::InvalidProblem(format!(
            "{what} has {} entries, expected {}",
            flat.len(),
            n * n
        )));
    }
    Ok(DMatrix::from_row_slice(n, n, flat))
}

fn flat_from_matrix(m: &DMatrix<f64>) -> Vec<f64> {
    let mut flat = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            flat.push(m[(i, j)]);
        }
    }
    flat
}

/// Parses a problem from its JSON text.
pub fn problem_from_json(text: &str) -> Result<SpmfProblem> {
    let file: ProblemFile = serde_json::from_str(text)?;
    if file.m != file.terms.len() {
        return Err(Error::InvalidProblem(format!(
            "m = {} but {} terms are given",
            file.m,
            file.terms.len()
        )));
    }
    let mut terms = Vec::with_capacity(file.terms.len());
    for (i, term) in file.terms.iter().enumerate() {
        let matrix = matrix_from_flat(file.n, &term.matrix, &format!("matrix of term {i}"))?;
        let coefficient = match &term.function {
            FunctionFile::Constant { value } => Coefficient::Constant(*value),
            FunctionFile::RationalQuadratic { b } => Coefficient::rational_quadratic(
                matrix_from_flat(file.n, b, &format!("B of term {i}"))?,
            )?,
        };
        terms.push((matrix, coefficient));
    }
    let policy = match &file.weights {
        WeightsFile::Policy(name) => match name.as_str() {
            "relative" => WeightPolicy::Relative,
            "unit" => WeightPolicy::Unit,
            other => {
                return Err(Error::InvalidWeights(format!(
                    "unknown weight policy {other:?}; use \"relative\", \"unit\", or an array"
                )))
            }
        },
        WeightsFile::Fixed(w) => WeightPolicy::Fixed(w.clone()),
    };
    SpmfProblem::new(terms, policy)
}

/// Serializes a problem to JSON text. The weights are written out
/// explicitly, so the exact values survive even for policy-derived weights.
pub fn problem_to_json(problem: &SpmfProblem) -> Result<String> {
    let mut terms = Vec::with_capacity(problem.term_count());
    for term in problem.terms() {
        let function = match term.coefficient() {
            Coefficient::Constant(value) => FunctionFile::Constant { value: *value },
            Coefficient::RationalQuadratic(b) => FunctionFile::RationalQuadratic {
                b: flat_from_matrix(b),
            },
            Coefficient::Custom { .. } => return Err(Error::Unserializable),
        };
        terms.push(TermFile {
            matrix: flat_from_matrix(term.matrix()),
            function,
        });
    }
    let file = ProblemFile {
        n: problem.dim(),
        m: problem.term_count(),
        terms,
        weights: WeightsFile::Fixed(problem.weights().to_vec()),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Reads a problem file.
pub fn load_problem(path: &Path) -> Result<SpmfProblem> {
    problem_from_json(&fs::read_to_string(path)?)
}

/// Writes a problem file.
pub fn save_problem(path: &Path, problem: &SpmfProblem) -> Result<()> {
    Ok(fs::write(path, problem_to_json(problem)? + "\n")?)
}

/// Reads a vector file: one number per line.
pub fn load_vector(path: &Path) -> Result<DVector<f64>> {
    let text = fs::read_to_string(path)?;
    parse_vector(&text)
}

/// Parses vector text: one number per line, blank lines skipped.
pub fn parse_vector(text: &str) -> Result<DVector<f64>> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: f64 = trimmed.parse().map_err(|_| {
            Error::Parse(format!("line {}: not a number: {trimmed:?}", lineno + 1))
        })?;
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::Parse("vector file holds no numbers".into()));
    }
    Ok(DVector::from_vec(values))
}

/// Writes a vector file.
pub fn save_vector(path: &Path, v: &DVector<f64>) -> Result<()> {
    let mut out = String::new();
    for x in v.iter() {
        out.push_str(&format!("{x}\n"));
    }
    Ok(fs::write(path, out)?)
}

/// Writes the ill-conditioning survey as CSV with header
/// `n,kappa,u_dot_v,alpha`.
pub fn write_wilkinson_csv(out: &mut dyn std::io::Write, rows: &[WilkinsonRow]) -> Result<()> {
    writeln!(out, "n,kappa,u_dot_v,alpha")?;
    for row in rows {
        writeln!(out, "{},{},{},{}", row.n, row.kappa, row.u_dot_v, row.alpha)?;
    }
    Ok(())
}

/// Writes branch data as CSV with header `delta,lambda,kappa,branch,simple`,
/// one row per branch point, branches in order, points in ascending
/// parameter order. An infinite condition number prints as `inf`.
pub fn write_branches_csv(out: &mut dyn std::io::Write, data: &BranchData) -> Result<()> {
    writeln!(out, "delta,lambda,kappa,branch,simple")?;
    for (index, branch) in data.branches.iter().enumerate() {
        for point in &branch.points {
            writeln!(
                out,
                "{},{},{},{},{}",
                point.delta, point.lambda, point.kappa, index, point.simple
            )?;
        }
    }
    Ok(())
}

fn direction_json(direction: &PerturbationDirection) -> serde_json::Value {
    serde_json::json!({
        "symmetric": direction.is_symmetric(),
        "norm": norm_name(direction.norm()),
        "matrices": direction
            .matrices()
            .iter()
            .map(flat_from_matrix)
            .collect::<Vec<_>>(),
    })
}

fn norm_name(norm: MatrixNorm) -> &'static str {
    match norm {
        MatrixNorm::Spectral => "2",
        MatrixNorm::Frobenius => "fro",
    }
}

fn quantity_name(q: Quantity) -> &'static str {
    match q {
        Quantity::Eigenvalue => "eigenvalue",
        Quantity::EigenvalueSymmetricSpectral => "eigenvalue_symmetric_2",
        Quantity::EigenvalueSymmetricFrobenius => "eigenvalue_symmetric_fro",
        Quantity::Eigenvector => "eigenvector",
        Quantity::EigenvectorSymmetricSpectral => "eigenvector_symmetric_2",
        Quantity::EigenvectorSymmetricFrobenius => "eigenvector_symmetric_fro",
    }
}

fn class_name(c: PerturbationClass) -> &'static str {
    match c {
        PerturbationClass::Arbitrary => "arbitrary",
        PerturbationClass::SymmetricSpectral => "symmetric_2",
        PerturbationClass::SymmetricFrobenius => "symmetric_fro",
    }
}

/// JSON rendering of a condition-number report, attaining directions
/// included.
#[must_use]
pub fn condition_report_json(report: &ConditionReport) -> serde_json::Value {
    let attaining: serde_json::Map<String, serde_json::Value> = report
        .attaining
        .iter()
        .map(|(q, d)| (quantity_name(*q).to_string(), direction_json(d)))
        .collect();
    serde_json::json!({
        "mode": match report.mode {
            crate::conditioning::ConditionMode::Relative => "relative",
            crate::conditioning::ConditionMode::Absolute => "absolute",
        },
        "kappa_lambda": report.kappa_lambda,
        "kappa_lambda_symmetric_2": report.kappa_lambda_sym_spectral,
        "kappa_lambda_symmetric_fro": report.kappa_lambda_sym_frobenius,
        "kappa_v": report.kappa_v,
        "kappa_v_symmetric_2": report.kappa_v_sym_spectral,
        "kappa_v_symmetric_fro": report.kappa_v_sym_frobenius,
        "alignment": report.alignment,
        "beta": report.beta,
        "attaining": attaining,
    })
}

/// JSON rendering of a backward-error report, attaining perturbations
/// included.
#[must_use]
pub fn backward_error_report_json(report: &BackwardErrorReport) -> serde_json::Value {
    let attaining: serde_json::Map<String, serde_json::Value> = report
        .attaining
        .iter()
        .map(|(c, att)| {
            (
                class_name(*c).to_string(),
                serde_json::json!({
                    "epsilon": att.epsilon,
                    "direction": direction_json(&att.direction),
                }),
            )
        })
        .collect();
    serde_json::json!({
        "lambda": report.lambda,
        "eta": report.eta,
        "eta_symmetric_2": report.eta_sym_spectral,
        "eta_symmetric_fro": report.eta_sym_frobenius,
        "gamma": report.gamma,
        "residual_norm": report.residual_norm,
        "attaining": attaining,
    })
}

/// JSON rendering of a Monte Carlo verification report.
#[must_use]
pub fn monte_carlo_report_json(report: &MonteCarloReport) -> serde_json::Value {
    serde_json::json!({
        "samples": report.samples,
        "seed": report.seed,
        "symmetric": report.symmetric,
        "norm": norm_name(report.norm),
        "kappa_absolute": report.kappa_absolute,
        "max_sensitivity": report.max_sensitivity,
        "max_ratio": report.max_ratio,
        "attained_sensitivity": report.attained_sensitivity,
        "attained_ratio": report.attained_ratio,
        "epsilon": report.epsilon,
        "max_solved_ratio": report.max_solved_ratio,
    })
}
