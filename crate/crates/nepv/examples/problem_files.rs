//! Building a problem in code, spelling it to JSON, and reading it back.
//!
//! Problems whose coefficients are constants or rational quadratic forms
//! round-trip through a small JSON schema; vectors use plain one-number-
//! per-line text files. Coefficients defined by closures work everywhere
//! in the library but have no file form.
//!
//! Run with: cargo run --example problem_files

use nalgebra::{DMatrix, DVector};
use nepv::io::{load_problem, load_vector, problem_to_json, save_problem, save_vector};
use nepv::{Coefficient, SpmfProblem, WeightPolicy};

fn main() -> nepv::Result<()> {
    let a0 = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, -1.0]);
    let a1 = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 3.0]);
    let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let problem = SpmfProblem::new(
        vec![
            (a0, Coefficient::Constant(1.0)),
            (a1, Coefficient::rational_quadratic(b)?),
        ],
        WeightPolicy::Relative,
    )?;

    println!("{}", problem_to_json(&problem)?);

    let dir = std::env::temp_dir();
    let problem_path = dir.join("two_term.json");
    let vector_path = dir.join("two_term_v.txt");
    save_problem(&problem_path, &problem)?;
    save_vector(&vector_path, &DVector::from_row_slice(&[0.6, 0.8]))?;

    let reloaded = load_problem(&problem_path)?;
    let v = load_vector(&vector_path)?;
    println!("reloaded: n = {}, m = {}", reloaded.dim(), reloaded.term_count());
    println!("weights: {:?}", reloaded.weights());
    println!("A(v) at the stored vector:\n{}", reloaded.matrix(&v)?);

    // The stored weights are explicit numbers, so editing matrices in the
    // file without touching the weights keeps the original budgets.
    assert_eq!(problem.weights(), reloaded.weights());
    println!("files written under {}", dir.display());
    Ok(())
}
