//! Backward errors of an approximate eigenpair, and why the Rayleigh
//! quotient is the right eigenvalue to report for a given vector.
//!
//! The backward error is the smallest perturbation of the term matrices,
//! relative to the weights, that makes the approximate pair exact. It is a
//! closed-form quantity: residual norm over `alpha ||v||`. Symmetric
//! perturbations cost nothing in the spectral norm and a factor
//! `gamma <= sqrt(2)` in the Frobenius norm, where `gamma` depends on the
//! angle between the residual and the vector.
//!
//! Run with: cargo run --example backward_errors

use nalgebra::DVector;
use nepv::backward_error::{
    backward_error_report, eigenvector_backward_error, rayleigh_quotient,
};
use nepv::experiments::wilkinson_problem;

fn main() -> nepv::Result<()> {
    let n = 5;
    let problem = wilkinson_problem(n)?;

    // Jiggle the exact eigenpair (5, e_1) into an approximate one.
    let mut v = DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.0 });
    for i in 1..n {
        v[i] = 1e-4 * (i as f64);
    }
    let lambda = 5.0 + 3e-4;

    let report = backward_error_report(&problem, lambda, &v)?;
    println!("approximate pair at lambda = {lambda}");
    println!("  eta (arbitrary)            = {:.6e}", report.eta);
    println!("  eta (symmetric, spectral)  = {:.6e}", report.eta_sym_spectral);
    println!("  eta (symmetric, Frobenius) = {:.6e}", report.eta_sym_frobenius);
    println!("  gamma = {:.6}", report.gamma);
    println!("  residual norm = {:.6e}", report.residual_norm);

    // For a fixed vector, the Rayleigh quotient minimizes the backward
    // error over all eigenvalue estimates; the residual it leaves is
    // orthogonal to v, so gamma hits sqrt(2).
    let best_lambda = rayleigh_quotient(&problem, &v)?;
    let (best_eta, _) = eigenvector_backward_error(&problem, &v)?;
    println!("\nRayleigh quotient = {best_lambda}");
    println!("  eta there = {:.6e} (was {:.6e})", best_eta, report.eta);
    let orthogonal = backward_error_report(&problem, best_lambda, &v)?;
    println!("  gamma there = {:.6} (sqrt(2) = {:.6})", orthogonal.gamma, 2f64.sqrt());
    Ok(())
}
