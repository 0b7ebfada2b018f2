use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::narrow_passage::NarrowPassageSpec;
use crate::error::{Error, Result};
use crate::planner::{plan, PlannerConfig, Termination, Variant};

/// The tuning parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parameter {
    #[serde(rename = "R0", alias = "r0")]
    R0,
    #[serde(rename = "nu")]
    Nu,
}

impl Parameter {
    pub fn name(self) -> &'static str {
        match self {
            Parameter::R0 => "R0",
            Parameter::Nu => "nu",
        }
    }
}

impl FromStr for Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R0" | "r0" => Ok(Parameter::R0),
            "nu" => Ok(Parameter::Nu),
            other => Err(Error::InvalidArgument(format!("unknown sweep parameter `{other}`"))),
        }
    }
}

fn default_multiplier() -> f64 {
    1.01
}
fn default_cap() -> usize {
    200_000
}
fn default_r0() -> f64 {
    0.02
}
fn default_nu() -> f64 {
    0.999
}
fn default_p0() -> f64 {
    0.1
}

/// Sweep description, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Only `"narrow_passage"` is supported.
    pub problem: String,
    pub dims: Vec<usize>,
    pub parameter: Parameter,
    pub values: Vec<f64>,
    pub variants: Vec<String>,
    pub repetitions: usize,
    #[serde(default = "default_cap")]
    pub iteration_cap: usize,
    #[serde(default = "default_multiplier")]
    pub early_stop_multiplier: f64,
    /// R0 used when the sweep varies `nu`.
    #[serde(default = "default_r0")]
    pub r0: f64,
    /// Forgetting factor used when the sweep varies `R0`.
    #[serde(default = "default_nu")]
    pub nu: f64,
    #[serde(default = "default_p0")]
    pub p0: f64,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.problem != "narrow_passage" {
            errs.push(format!("problem: unsupported `{}` (expected narrow_passage)", self.problem));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&n| n < 2) {
            errs.push("dims: need at least one dimension, all >= 2".into());
        }
        if self.values.is_empty() {
            errs.push("values: must be nonempty".into());
        }
        if self.repetitions < 1 {
            errs.push("repetitions: must be >= 1".into());
        }
        if self.iteration_cap < 1 {
            errs.push("iteration_cap: must be >= 1".into());
        }
        if !(self.early_stop_multiplier >= 1.0) {
            errs.push("early_stop_multiplier: must be >= 1".into());
        }
        if self.variants.is_empty() {
            errs.push("variants: must be nonempty".into());
        }
        for v in &self.variants {
            if let Err(e) = v.parse::<Variant>() {
                errs.push(format!("variants: {e}"));
            }
        }
        match self.parameter {
            Parameter::R0 if self.values.iter().any(|&v| !(v > 0.0)) => errs.push("values: R0 must be > 0".into()),
            Parameter::Nu if self.values.iter().any(|&v| !(0.0..1.0).contains(&v)) => {
                errs.push("values: nu must lie in [0, 1)".into())
            }
            _ => {}
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Parse(errs.join("; ")))
        }
    }

    pub fn parsed_variants(&self) -> Result<Vec<Variant>> {
        self.variants.iter().map(|v| v.parse()).collect()
    }

    /// Number of planner runs the sweep performs.
    pub fn run_count(&self) -> usize {
        self.values.len() * self.dims.len() * self.variants.len() * self.repetitions
    }
}

/// Outcome of one seeded planner run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub parameter: Parameter,
    pub value: f64,
    pub n: usize,
    pub variant: Variant,
    pub repetition: usize,
    pub seed: u64,
    /// Iteration at which the threshold was crossed, or the cap.
    pub iterations: usize,
    pub reached: bool,
    pub final_cost: f64,
    /// Wall time; informational only.
    pub wall_ms: f64,
    pub error: Option<String>,
}

/// 64-bit FNV-1a.
fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Seed for repetition `rep` of a problem instance. Parameter value and
/// variant are left out so every cell of a sweep sees the same seed
/// schedule, which makes comparisons between cells paired.
pub fn run_seed(problem: &str, n: usize, rep: usize) -> u64 {
    fnv1a(format!("{problem}|n={n}|rep={rep}").as_bytes())
}

#[derive(Debug, Clone, PartialEq)]
struct Job {
    value: f64,
    n: usize,
    variant: Variant,
    repetition: usize,
}

fn planner_config(spec: &SweepSpec, job: &Job, seed: u64, threshold: f64) -> PlannerConfig<f64> {
    let mut cfg = PlannerConfig::new(job.variant);
    cfg.seed = seed;
    cfg.max_iterations = Some(spec.iteration_cap);
    cfg.early_stop_cost = Some(threshold);
    cfg.r0 = spec.r0;
    cfg.nu = spec.nu;
    cfg.p0 = spec.p0;
    cfg.record_trace = false;
    match spec.parameter {
        Parameter::R0 => cfg.r0 = job.value,
        Parameter::Nu => cfg.nu = job.value,
    }
    cfg
}

fn run_job(spec: &SweepSpec, job: &Job) -> RunRecord {
    let seed = run_seed(&spec.problem, job.n, job.repetition);
    let mut record = RunRecord {
        parameter: spec.parameter,
        value: job.value,
        n: job.n,
        variant: job.variant,
        repetition: job.repetition,
        seed,
        iterations: spec.iteration_cap,
        reached: false,
        final_cost: f64::INFINITY,
        wall_ms: 0.0,
        error: None,
    };
    let outcome = NarrowPassageSpec::<f64>::new(job.n).and_then(|np| {
        let problem = np.problem()?;
        let threshold = spec.early_stop_multiplier * np.minima().global();
        plan(&problem, &planner_config(spec, job, seed, threshold))
    });
    match outcome {
        Ok(r) => {
            record.reached = r.termination == Termination::EarlyStop;
            record.iterations = if record.reached { r.iterations } else { spec.iteration_cap };
            record.final_cost = r.best_cost;
            record.wall_ms = r.elapsed_ms;
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Runs every (value, n, variant, repetition) cell of the sweep on up to
/// `workers` threads. Records come back in a fixed order regardless of
/// completion order; `on_done` is called as each run finishes.
pub fn run_benchmark<F>(spec: &SweepSpec, workers: usize, on_done: F) -> Result<Vec<RunRecord>>
where
    F: Fn(&RunRecord) + Sync,
{
    spec.validate()?;
    let variants = spec.parsed_variants()?;
    let mut jobs = Vec::with_capacity(spec.run_count());
    for &value in &spec.values {
        for &n in &spec.dims {
            for &variant in &variants {
                for repetition in 0..spec.repetitions {
                    jobs.push(Job { value, n, variant, repetition });
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let r = run_job(spec, job);
                on_done(&r);
                r
            })
            .collect()
    }))
}

pub const RUNS_HEADER: &str =
    "parameter,value,n,variant,repetition,seed,iterations,reached,final_cost,status,wall_ms";

/// Writes `runs.csv`. The wall-time column is last so the rest of each row
/// can be compared byte for byte across reruns.
pub fn write_runs_csv<W: Write>(w: W, records: &[RunRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RUNS_HEADER.split(','))?;
    for r in records {
        out.write_record([
            r.parameter.name().to_string(),
            r.value.to_string(),
            r.n.to_string(),
            r.variant.name().to_string(),
            r.repetition.to_string(),
            r.seed.to_string(),
            r.iterations.to_string(),
            r.reached.to_string(),
            if r.final_cost.is_finite() { r.final_cost.to_string() } else { "inf".into() },
            r.error.clone().map_or("ok".to_string(), |e| format!("error: {e}")),
            format!("{:.3}", r.wall_ms),
        ])?;
    }
    out.flush()?;
    Ok(())
}
