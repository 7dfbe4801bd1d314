//! Command-line front end.
//!
//! Six subcommands: `cond` and `backward` analyze a given pair, `solve`
//! refines one, `wilkinson` and `bifurcation` run the two built-in problem
//! families, and `verify` stress-tests a condition number against random
//! perturbations.
//!
//! Exit codes: 0 on success, 2 for unusable input (bad flags, unreadable or
//! malformed files, shape mismatches), 3 for numerical failure (solver
//! non-convergence, the supplied value not being an eigenvalue, a failed
//! verification), 4 when an eigenvalue is not simple and the requested
//! quantity needs it to be.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use nepv::conditioning::{self, ConditionMode};
use nepv::solvers::{self, Selector, SolveOptions};
use nepv::{backward_error, experiments, io, Error, MatrixNorm, SpmfProblem, WeightPolicy};

#[derive(Parser)]
#[command(name = "nepv", version, about = "Eigenpair conditioning and backward errors for eigenvector-nonlinear problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Condition numbers of an eigenpair, with respect to perturbations of
    /// the coefficient matrices.
    Cond(CondArgs),
    /// Backward error of an approximate eigenpair.
    Backward(BackwardArgs),
    /// Refine an approximate eigenpair by Newton or SCF iteration.
    Solve(SolveArgs),
    /// Conditioning table for the Wilkinson-like coupled family.
    Wilkinson(WilkinsonArgs),
    /// Branch sweep of the 3x3 two-term family with a fold parameter.
    Bifurcation(BifurcationArgs),
    /// Monte-Carlo check that no admissible perturbation beats the
    /// predicted condition number.
    Verify(VerifyArgs),
}

/// The flags every pair-analysis subcommand shares.
#[derive(Args)]
struct PairInput {
    /// Problem description, JSON.
    #[arg(long, value_name = "FILE")]
    problem: PathBuf,
    /// Eigenvalue estimate.
    #[arg(long, value_name = "REAL", allow_negative_numbers = true)]
    lambda: f64,
    /// Eigenvector estimate, one entry per line.
    #[arg(long, value_name = "FILE")]
    vector: PathBuf,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum NormArg {
    /// Spectral norm.
    #[value(name = "2")]
    Spectral,
    /// Frobenius norm.
    #[value(name = "fro")]
    Frobenius,
}

impl From<NormArg> for MatrixNorm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Spectral => MatrixNorm::Spectral,
            NormArg::Frobenius => MatrixNorm::Frobenius,
        }
    }
}

impl NormArg {
    fn label(self) -> &'static str {
        match self {
            NormArg::Spectral => "2",
            NormArg::Frobenius => "fro",
        }
    }
}

#[derive(Args)]
struct CondArgs {
    #[command(flatten)]
    pair: PairInput,
    /// Override the stored weights: "relative", "unit", or a file with one
    /// weight per line.
    #[arg(long, value_name = "relative|unit|FILE")]
    weights: Option<String>,
    /// Norm bounding each perturbation matrix.
    #[arg(long, default_value = "2")]
    norm: NormArg,
    /// Restrict perturbations to symmetric matrices.
    #[arg(long)]
    symmetric: bool,
    /// Report absolute instead of relative condition numbers.
    #[arg(long)]
    absolute: bool,
    /// Emit the full report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BackwardArgs {
    #[command(flatten)]
    pair: PairInput,
    /// Override the stored weights: "relative", "unit", or a file with one
    /// weight per line.
    #[arg(long, value_name = "relative|unit|FILE")]
    weights: Option<String>,
    /// Norm measuring the perturbation size.
    #[arg(long, default_value = "2")]
    norm: NormArg,
    /// Restrict perturbations to symmetric matrices.
    #[arg(long)]
    symmetric: bool,
    /// Replace the given eigenvalue by the Rayleigh quotient of the vector,
    /// which minimizes the backward error.
    #[arg(long)]
    rayleigh: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Newton,
    Scf,
}

#[derive(Args)]
struct SolveArgs {
    /// Problem description, JSON.
    #[arg(long, value_name = "FILE")]
    problem: PathBuf,
    /// Iteration to run.
    #[arg(long, default_value = "newton")]
    method: MethodArg,
    /// Starting eigenvalue; defaults to the Rayleigh quotient of the
    /// starting vector.
    #[arg(long, value_name = "REAL", allow_negative_numbers = true)]
    lambda0: Option<f64>,
    /// Starting vector: a file with one entry per line, or "random:SEED".
    /// Defaults to the normalized all-ones vector.
    #[arg(long, value_name = "FILE|random:SEED")]
    v0: Option<String>,
    /// Backward error accepted as converged.
    #[arg(long, default_value_t = 1e-13)]
    tol: f64,
    /// Iteration cap.
    #[arg(long = "max-iter", value_name = "N", default_value_t = 60)]
    max_iter: usize,
}

#[derive(Args)]
struct WilkinsonArgs {
    /// Problem sizes, comma separated.
    #[arg(long, value_name = "N,N,...", value_delimiter = ',', default_value = "2,5,10,20,30")]
    n: Vec<usize>,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE.csv")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BifurcationArgs {
    /// Left end of the parameter window.
    #[arg(long = "delta-min", value_name = "REAL", default_value_t = -5.0, allow_negative_numbers = true)]
    delta_min: f64,
    /// Right end of the parameter window.
    #[arg(long = "delta-max", value_name = "REAL", default_value_t = 0.0, allow_negative_numbers = true)]
    delta_max: f64,
    /// Number of marching steps across the window.
    #[arg(long, value_name = "N", default_value_t = 500)]
    steps: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE.csv")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ClassArg {
    /// Any matrix within the norm budget.
    Arbitrary,
    /// Symmetric matrices only.
    Symmetric,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    pair: PairInput,
    /// Number of random directions to draw.
    #[arg(long, value_name = "N")]
    samples: usize,
    /// Perturbation size for the nonlinear re-solve check.
    #[arg(long, value_name = "REAL")]
    eps: f64,
    /// Random seed.
    #[arg(long, value_name = "N")]
    seed: u64,
    /// Perturbation class to sample from.
    #[arg(long, default_value = "arbitrary")]
    class: ClassArg,
    /// Norm the per-term budget is measured in.
    #[arg(long, default_value = "2")]
    norm: NormArg,
}

fn main() -> ExitCode {
    // Die quietly when the reader of a pipe goes away, like any filter.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(failure_code(&err))
        }
    }
}

fn run(command: Command) -> nepv::Result<ExitCode> {
    match command {
        Command::Cond(args) => cond(args),
        Command::Backward(args) => backward(args),
        Command::Solve(args) => solve(args),
        Command::Wilkinson(args) => wilkinson(args),
        Command::Bifurcation(args) => bifurcation(args),
        Command::Verify(args) => verify(args),
    }
}

/// Input problems map to exit 2, failed numerics to 3, and a repeated
/// eigenvalue where a simple one is needed to 4.
fn failure_code(err: &Error) -> u8 {
    match err {
        Error::NonSimple { .. } => 4,
        Error::MaxIterExceeded { .. }
        | Error::SingularJacobian { .. }
        | Error::NotAnEigenvalue { .. }
        | Error::NotAnEigenpair { .. }
        | Error::ZeroEigenvalue
        | Error::DegenerateWeights => 3,
        _ => 2,
    }
}

fn load_pair(pair: &PairInput, weights: Option<&str>) -> nepv::Result<(SpmfProblem, DVector<f64>)> {
    let mut problem = io::load_problem(&pair.problem)?;
    if let Some(spec) = weights {
        problem.set_weights(weight_policy(spec)?)?;
    }
    let v = io::load_vector(&pair.vector)?;
    Ok((problem, v))
}

fn weight_policy(spec: &str) -> nepv::Result<WeightPolicy> {
    match spec {
        "relative" => Ok(WeightPolicy::Relative),
        "unit" => Ok(WeightPolicy::Unit),
        path => {
            let w = io::load_vector(Path::new(path))?;
            Ok(WeightPolicy::Fixed(w.iter().copied().collect()))
        }
    }
}

fn cond(args: CondArgs) -> nepv::Result<ExitCode> {
    let (problem, v) = load_pair(&args.pair, args.weights.as_deref())?;
    let mode = if args.absolute {
        ConditionMode::Absolute
    } else {
        ConditionMode::Relative
    };
    let report = conditioning::condition_report(&problem, args.pair.lambda, &v, mode)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&io::condition_report_json(&report))?);
        return Ok(ExitCode::SUCCESS);
    }
    let (kappa_lambda, kappa_v) = match (args.symmetric, args.norm) {
        (false, _) => (report.kappa_lambda, report.kappa_v),
        (true, NormArg::Spectral) => (report.kappa_lambda_sym_spectral, report.kappa_v_sym_spectral),
        (true, NormArg::Frobenius) => (
            report.kappa_lambda_sym_frobenius,
            report.kappa_v_sym_frobenius,
        ),
    };
    let class = if args.symmetric {
        format!("symmetric ({})", args.norm.label())
    } else {
        "arbitrary".to_string()
    };
    println!("mode = {}", if args.absolute { "absolute" } else { "relative" });
    println!("class = {class}");
    println!("kappa_lambda = {kappa_lambda}");
    println!("kappa_v = {kappa_v}");
    println!("u_dot_v = {}", report.alignment);
    println!("beta = {}", report.beta);
    Ok(ExitCode::SUCCESS)
}

fn backward(args: BackwardArgs) -> nepv::Result<ExitCode> {
    let (problem, v) = load_pair(&args.pair, args.weights.as_deref())?;
    let lambda = if args.rayleigh {
        backward_error::rayleigh_quotient(&problem, &v)?
    } else {
        args.pair.lambda
    };
    let report = backward_error::backward_error_report(&problem, lambda, &v)?;
    println!("lambda = {lambda}");
    println!("eta = {}", report.eta);
    if args.symmetric {
        let eta_sym = match args.norm {
            NormArg::Spectral => report.eta_sym_spectral,
            NormArg::Frobenius => report.eta_sym_frobenius,
        };
        println!("eta_sym_{} = {eta_sym}", args.norm.label());
        println!("gamma = {}", report.gamma);
    }
    println!("residual_norm = {}", report.residual_norm);
    Ok(ExitCode::SUCCESS)
}

fn starting_vector(n: usize, spec: Option<&str>) -> nepv::Result<DVector<f64>> {
    match spec {
        None => Ok(DVector::from_element(n, 1.0) / (n as f64).sqrt()),
        Some(spec) => {
            if let Some(seed) = spec.strip_prefix("random:") {
                let seed: u64 = seed
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad seed in {spec:?}")))?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                // A Gaussian n-vector is nonzero with overwhelming
                // probability; the retry guards the pathological draw.
                loop {
                    let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
                    let norm = v.norm();
                    if norm > 1e-8 {
                        return Ok(v / norm);
                    }
                }
            }
            io::load_vector(Path::new(spec))
        }
    }
}

fn solve(args: SolveArgs) -> nepv::Result<ExitCode> {
    let problem = io::load_problem(&args.problem)?;
    let v0 = starting_vector(problem.dim(), args.v0.as_deref())?;
    let opts = SolveOptions {
        max_iter: args.max_iter,
        tol: args.tol,
        ..SolveOptions::default()
    };
    let (report, method) = match args.method {
        MethodArg::Newton => {
            let lambda0 = match args.lambda0 {
                Some(l) => l,
                None => backward_error::rayleigh_quotient(&problem, &v0)?,
            };
            (solvers::newton_solve(&problem, lambda0, &v0, &opts)?, "newton")
        }
        MethodArg::Scf => {
            let selector = match args.lambda0 {
                Some(l) => Selector::NearestTo(l),
                None => Selector::Smallest,
            };
            (solvers::scf_solve(&problem, selector, &v0, &opts)?, "scf")
        }
    };
    let eta = report
        .iterations
        .last()
        .map_or(report.initial_eta, |rec| rec.eta);
    println!("method = {method}");
    println!("lambda = {}", report.eigenpair.lambda);
    println!("eta = {eta}");
    println!("residual_norm = {}", report.eigenpair.residual_norm);
    println!("iterations = {}", report.iterations.len());
    let entries: Vec<String> = report
        .eigenpair
        .vector
        .iter()
        .map(f64::to_string)
        .collect();
    println!("vector = {}", entries.join(" "));
    Ok(ExitCode::SUCCESS)
}

/// Writes one CSV either to the given path or to stdout.
fn emit_csv(
    out: Option<&Path>,
    write: impl Fn(&mut dyn std::io::Write) -> nepv::Result<()>,
) -> nepv::Result<()> {
    match out {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            write(&mut file)?;
            file.flush()?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            write(&mut stdout)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn wilkinson(args: WilkinsonArgs) -> nepv::Result<ExitCode> {
    let rows = experiments::wilkinson_report(&args.n)?;
    emit_csv(args.out.as_deref(), |out| io::write_wilkinson_csv(out, &rows))?;
    Ok(ExitCode::SUCCESS)
}

fn bifurcation(args: BifurcationArgs) -> nepv::Result<ExitCode> {
    let data = experiments::bifurcation_sweep(args.delta_min, args.delta_max, args.steps)?;
    emit_csv(args.out.as_deref(), |out| io::write_branches_csv(out, &data))?;
    // The summary goes to stderr so stdout stays pure CSV when no file is
    // given.
    let mut log: Box<dyn std::io::Write> = if args.out.is_some() {
        Box::new(std::io::stdout().lock())
    } else {
        Box::new(std::io::stderr().lock())
    };
    writeln!(log, "branches = {}", data.branches.len())?;
    for tp in &data.turning_points {
        writeln!(log, "turning_point delta = {} lambda = {}", tp.delta, tp.lambda)?;
    }
    for crossing in data.zero_crossings() {
        writeln!(log, "zero_crossing delta = {crossing}")?;
    }
    log.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> nepv::Result<ExitCode> {
    let (problem, v) = load_pair(&args.pair, None)?;
    let report = experiments::monte_carlo_condition_check(
        &problem,
        args.pair.lambda,
        &v,
        args.samples,
        args.seed,
        args.class == ClassArg::Symmetric,
        args.norm.into(),
        Some(args.eps),
    )?;
    let class = match args.class {
        ClassArg::Arbitrary => "arbitrary",
        ClassArg::Symmetric => "symmetric",
    };
    // The sampled maximum must stay below the predicted supremum, and the
    // constructed optimal direction must attain it.
    let bound_ok = report.max_ratio <= 1.0 + 1e-10;
    let attained_ok = (report.attained_ratio - 1.0).abs() <= 1e-10;
    println!("samples = {}", report.samples);
    println!("seed = {}", report.seed);
    println!("class = {class}");
    println!("norm = {}", args.norm.label());
    println!("kappa_absolute = {}", report.kappa_absolute);
    println!("max_ratio = {}", report.max_ratio);
    println!("attained_ratio = {}", report.attained_ratio);
    if let Some(solved) = report.max_solved_ratio {
        println!("max_solved_ratio = {solved}");
    }
    println!("ok = {}", bound_ok && attained_ok);
    if bound_ok && attained_ok {
        Ok(ExitCode::SUCCESS)
    } else {
        std::io::stdout().flush()?;
        eprintln!("error: a sampled direction beat the predicted condition number");
        Ok(ExitCode::from(3))
    }
}
