use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use mirrt::benchmark::{aggregate_percentiles, run_benchmark, write_runs_csv, write_summary_csv, SweepSpec, DEFAULT_QUANTILES};
use mirrt::planner::{trace_file_name, write_trace_csv, Planner};
use mirrt::problem_file::{ProblemFile, SolutionFile};
use mirrt::{Error, PlannerConfig, Problem, Variant};

#[derive(Debug, Parser)]
#[command(name = "mirrt", version, about = "Mixed-strategy informed RRT* planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan a path for a problem file.
    Solve(SolveArgs),
    /// Run a parameter sweep on the narrow-passage benchmark.
    Bench(BenchArgs),
    /// Check a problem file and print its key quantities.
    Validate {
        problem: PathBuf,
    },
}

#[derive(Debug, Args)]
struct SolveArgs {
    problem: PathBuf,
    #[arg(long, default_value = "mi")]
    variant: Variant,
    /// Tube radius factor.
    #[arg(long, default_value_t = 0.02)]
    r0: f64,
    /// Forgetting factor of the local-sampling probability.
    #[arg(long, default_value_t = 0.999)]
    nu: f64,
    /// Initial local-sampling probability.
    #[arg(long, default_value_t = 0.1)]
    p0: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    #[arg(long)]
    max_time_ms: Option<u64>,
    /// Stop once the best cost drops below this value.
    #[arg(long)]
    early_stop_cost: Option<f64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    sweep: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Parallel runs; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
}

/// Failure mapped onto the exit-code contract.
#[derive(Debug)]
enum Failure {
    /// Unreadable or malformed input, bad flag values.
    Input(anyhow::Error),
    /// The problem itself is infeasible or violates an invariant.
    Invalid(anyhow::Error),
    Internal(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Input(_) => 2,
            Failure::Invalid(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Input(e) | Failure::Invalid(e) | Failure::Internal(e) => e,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => Failure::Input(e.into()),
            Error::InvalidProblem(_) | Error::InformedSetEmpty { .. } | Error::AdmissibilityViolation { .. } => {
                Failure::Invalid(e.into())
            }
            _ => Failure::Internal(e.into()),
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(Failure::Input)
}

fn load_problem(path: &Path) -> Result<Problem, Failure> {
    let text = read_input(path)?;
    let file = ProblemFile::from_json(&text).map_err(|e| Failure::Input(anyhow::Error::new(e).context(path.display().to_string())))?;
    match file.to_problem() {
        Ok(p) => Ok(p),
        Err(Error::InvalidProblem(violations)) => {
            Err(Failure::Invalid(anyhow::anyhow!("{}: invalid problem:\n  - {}", path.display(), violations.join("\n  - "))))
        }
        Err(e) => Err(e.into()),
    }
}

fn prepare_out_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))
        .map_err(Failure::Input)
}

/// Shortest decimal form with at most ten fractional digits.
fn fmt_value(v: f64) -> String {
    if !v.is_finite() {
        return if v > 0.0 { "inf".into() } else { v.to_string() };
    }
    let s = format!("{v:.10}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn internal(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Internal(e.into())
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    let problem = load_problem(&args.problem)?;
    let mut config = PlannerConfig::new(args.variant);
    config.r0 = args.r0;
    config.nu = args.nu;
    config.p0 = args.p0;
    config.seed = args.seed;
    config.max_iterations = Some(args.max_iters);
    config.max_wall_time = args.max_time_ms.map(Duration::from_millis);
    config.early_stop_cost = args.early_stop_cost;
    config.validate()?;
    prepare_out_dir(&args.out)?;

    let result = Planner::new(&problem, config)?.run()?;

    let solution = SolutionFile::from_path(result.best_path.as_ref());
    let solution_path = args.out.join("solution.json");
    let json = serde_json::to_string_pretty(&solution).map_err(internal)?;
    fs::write(&solution_path, json + "\n").with_context(|| format!("writing {}", solution_path.display())).map_err(internal)?;

    let stem = args.problem.file_stem().map_or("problem".into(), |s| s.to_string_lossy().into_owned());
    let trace_path = args.out.join(trace_file_name(&stem, args.variant, args.seed));
    let file = File::create(&trace_path).with_context(|| format!("writing {}", trace_path.display())).map_err(internal)?;
    write_trace_csv(BufWriter::new(file), &result.trace, true)?;

    println!(
        "cost={} iterations={} time_ms={:.3} termination={}",
        fmt_value(result.best_cost),
        result.iterations,
        result.elapsed_ms,
        result.termination.name()
    );
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let text = read_input(&args.sweep)?;
    let spec = SweepSpec::from_json(&text).map_err(|e| Failure::Input(anyhow::Error::new(e).context(args.sweep.display().to_string())))?;
    if args.workers == Some(0) {
        return Err(Failure::Input(anyhow::anyhow!("--workers must be at least 1")));
    }
    prepare_out_dir(&args.out)?;
    let workers = args.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));

    let total = spec.run_count();
    let done = AtomicUsize::new(0);
    let records = run_benchmark(&spec, workers, |r| {
        let k = done.fetch_add(1, Ordering::Relaxed) + 1;
        let status = r.error.as_deref().map_or_else(|| if r.reached { "reached".into() } else { "capped".into() }, |e| format!("error: {e}"));
        eprintln!(
            "[{k}/{total}] {}={} n={} variant={} rep={} iterations={} {status}",
            r.parameter.name(),
            r.value,
            r.n,
            r.variant,
            r.repetition,
            r.iterations
        );
    })?;

    let runs_path = args.out.join("runs.csv");
    let file = File::create(&runs_path).with_context(|| format!("writing {}", runs_path.display())).map_err(internal)?;
    write_runs_csv(BufWriter::new(file), &records)?;

    let aggregation = aggregate_percentiles(&records, &DEFAULT_QUANTILES);
    for w in &aggregation.warnings {
        eprintln!("warning: {w}");
    }
    let summary_path = args.out.join("summary.csv");
    let file = File::create(&summary_path).with_context(|| format!("writing {}", summary_path.display())).map_err(internal)?;
    write_summary_csv(BufWriter::new(file), &aggregation.rows)?;

    let failed = records.iter().filter(|r| r.error.is_some()).count();
    println!(
        "runs={} failed={failed} groups={} runs_csv={} summary_csv={}",
        records.len(),
        aggregation.rows.len(),
        runs_path.display(),
        summary_path.display()
    );
    Ok(())
}

fn validate(path: &Path) -> Result<(), Failure> {
    let problem = load_problem(path)?;
    println!("dimension={} c_min={} u={}", problem.dim(), fmt_value(problem.c_min()), fmt_value(problem.lower_bound()));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Bench(args) => bench(args),
        Command::Validate { problem } => validate(&problem),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
