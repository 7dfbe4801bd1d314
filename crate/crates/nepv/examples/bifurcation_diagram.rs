//! Branch diagram of the 3x3 two-term family with a fold parameter.
//!
//! The family `A_0(delta) + (v^T B v / v^T v) A_1` has three eigenpairs for
//! `delta` outside `(-3.904, -1.346)` and five inside: two extra branches
//! are born and die in saddle-node folds. The sweep follows every branch,
//! locates both folds, and reports where a branch crosses `lambda = 0`,
//! which sends the relative condition number to infinity.
//!
//! Run with: cargo run --release --example bifurcation_diagram

use nepv::experiments::bifurcation_sweep;
use nepv::io::write_branches_csv;

fn main() -> nepv::Result<()> {
    let data = bifurcation_sweep(-5.0, 0.0, 500)?;

    println!("branches: {}", data.branches.len());
    for (index, branch) in data.branches.iter().enumerate() {
        let first = branch.points.first().expect("branches are nonempty");
        let last = branch.points.last().expect("branches are nonempty");
        let kappa_max = branch
            .points
            .iter()
            .map(|p| p.kappa)
            .fold(0.0f64, f64::max);
        println!(
            "  branch {index}: delta in [{:.4}, {:.4}], lambda from {:.4} to {:.4}, max kappa {:.3e}",
            first.delta, last.delta, first.lambda, last.lambda, kappa_max
        );
    }

    for tp in &data.turning_points {
        println!("fold at delta = {:.6}, lambda = {:.6}", tp.delta, tp.lambda);
    }
    for crossing in data.zero_crossings() {
        println!("lambda = 0 crossing at delta = {:.6}", crossing);
    }

    // The same table the `bifurcation` subcommand emits.
    let path = std::env::temp_dir().join("branches.csv");
    let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
    write_branches_csv(&mut file, &data)?;
    println!("full table written to {}", path.display());
    Ok(())
}
