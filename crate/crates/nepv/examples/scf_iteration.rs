//! Self-consistent-field iteration: freeze the vector, diagonalize, keep
//! one eigenpair, repeat.
//!
//! SCF converges linearly but needs no derivative of the coefficients and
//! no starting eigenvalue; the selector decides which eigenpair of the
//! frozen matrix to follow. Not every eigenpair of the nonlinear problem
//! is an attracting fixed point of the iteration, though: this parameter
//! value has three eigenpairs and SCF can hold only two of them, however
//! it is damped or targeted. The third is Newton's job.
//!
//! Run with: cargo run --example scf_iteration

use nalgebra::DVector;
use nepv::experiments::bifurcation_problem;
use nepv::solvers::{enumerate_eigenpairs, newton_solve, scf_solve, Selector, SolveOptions};

fn main() -> nepv::Result<()> {
    let problem = bifurcation_problem(-0.5)?;
    let v0 = DVector::from_element(3, 1.0);
    // Tolerance a little above the rounding floor of the dense
    // eigensolver; SCF's linear rate makes the last digit expensive.
    let opts = SolveOptions {
        tol: 1e-12,
        max_iter: 200,
        ..SolveOptions::default()
    };

    let pairs = enumerate_eigenpairs(&problem, 600)?;
    let all: Vec<String> = pairs.iter().map(|p| format!("{:.6}", p.lambda)).collect();
    println!("eigenvalues of the problem: [{}]", all.join(", "));

    for (label, selector) in [
        ("smallest", Selector::Smallest),
        ("largest", Selector::Largest),
    ] {
        let report = scf_solve(&problem, selector, &v0, &opts)?;
        println!(
            "{label:>8}: lambda = {:.12} in {} steps",
            report.eigenpair.lambda,
            report.iterations.len()
        );
    }

    // Damping mixes each new vector with the previous one. The full step
    // is already stable here, so damping only shortens the steps.
    let damped = SolveOptions {
        damping: 0.5,
        ..opts.clone()
    };
    let report = scf_solve(&problem, Selector::Smallest, &v0, &damped)?;
    println!(
        "  damped: lambda = {:.12} in {} steps",
        report.eigenpair.lambda,
        report.iterations.len()
    );

    // The middle eigenpair repels SCF: started close by with the matching
    // target, the iteration drifts to a neighbor or stalls. Newton pulls
    // the same guess straight back.
    let middle = &pairs[1];
    let mut near = middle.vector.clone();
    near[0] += 1e-3;
    near /= near.norm();
    println!("\nmiddle eigenpair: lambda = {:.12}", middle.lambda);
    match scf_solve(&problem, Selector::NearestTo(middle.lambda), &near, &opts) {
        Ok(report) => println!(
            "  SCF from nearby lands at {:.12} after {} steps",
            report.eigenpair.lambda,
            report.iterations.len()
        ),
        Err(err) => println!("  SCF from nearby: {err}"),
    }
    let refined = newton_solve(&problem, middle.lambda, &near, &opts)?;
    println!(
        "  Newton from nearby: lambda = {:.12} in {} steps (residual {:.2e})",
        refined.eigenpair.lambda,
        refined.iterations.len(),
        refined.eigenpair.residual_norm
    );
    Ok(())
}
