//! Anytime RRT* driver with three sampling variants: uniform, informed, and
//! the adaptive mixed strategy that alternates informed sampling with
//! local sampling around the incumbent.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{Configuration, Path, Problem};
use crate::samplers::{
    informed_set_measure, local_radius, sample_local, sample_uniform, select_strategy, GuessState, InformedSampler,
    RngState, SamplerChoice, DEFAULT_REJECTION_BUDGET,
};
use crate::scalar::Real;
use crate::tree::{default_gamma, rewire_radius, ExtendOutcome, RrtStar, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    UniformRrtStar,
    InformedRrtStar,
    MixedStrategyRrtStar,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::UniformRrtStar => "uniform",
            Variant::InformedRrtStar => "informed",
            Variant::MixedStrategyRrtStar => "mi",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Variant::UniformRrtStar),
            "informed" => Ok(Variant::InformedRrtStar),
            "mi" => Ok(Variant::MixedStrategyRrtStar),
            other => Err(Error::InvalidArgument(format!("unknown variant `{other}` (expected uniform|informed|mi)"))),
        }
    }
}

/// Which value of the local-sampling probability feeds the rewire-radius
/// correction `(1 - phi)^(-1/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhiMode {
    /// The current guess `p_k`.
    #[default]
    Instantaneous,
    /// The clamp `p_max`, a fixed worst case.
    Maximum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig<T> {
    pub variant: Variant,
    /// Steering step; `None` means 0.1 x bounds diameter.
    pub steer_step: Option<T>,
    /// Rewiring constant; `None` derives it from the bounds measure.
    pub gamma: Option<T>,
    pub r0: T,
    pub nu: T,
    pub p0: T,
    pub p_max: T,
    pub seed: u64,
    pub max_iterations: Option<usize>,
    pub max_wall_time: Option<Duration>,
    /// Stop as soon as the incumbent cost drops strictly below this value.
    pub early_stop_cost: Option<T>,
    /// Probability of sampling the goal before a solution exists.
    pub goal_bias: T,
    /// Before a solution exists, every this many iterations the goal itself
    /// is used as the sample.
    pub goal_connect_every: usize,
    pub rejection_budget: usize,
    pub phi_mode: PhiMode,
    /// Pins the local-sampling probability (mixed variant only). Values at
    /// or above `p_max` make the sampler inadmissible; meant for studying
    /// pure local convergence.
    pub fixed_local_probability: Option<T>,
    pub record_trace: bool,
}

impl<T: Real> PlannerConfig<T> {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            steer_step: None,
            gamma: None,
            r0: T::of(0.02),
            nu: T::of(0.999),
            p0: T::of(GuessState::<T>::DEFAULT_P0),
            p_max: T::of(GuessState::<T>::DEFAULT_P_MAX),
            seed: 0,
            max_iterations: Some(10_000),
            max_wall_time: None,
            early_stop_cost: None,
            goal_bias: T::of(0.05),
            goal_connect_every: 50,
            rejection_budget: DEFAULT_REJECTION_BUDGET,
            phi_mode: PhiMode::Instantaneous,
            fixed_local_probability: None,
            record_trace: true,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = Some(n);
        self
    }

    pub fn with_early_stop(mut self, cost: T) -> Self {
        self.early_stop_cost = Some(cost);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.max_iterations.is_none() && self.max_wall_time.is_none() {
            errs.push("budget needs max_iterations and/or max_wall_time".to_string());
        }
        if let Some(s) = self.steer_step {
            if !(s > T::zero()) {
                errs.push("steer_step must be > 0".into());
            }
        }
        if let Some(g) = self.gamma {
            if !(g > T::zero()) {
                errs.push("gamma must be > 0".into());
            }
        }
        if !(self.r0 > T::zero()) {
            errs.push("r0 must be > 0".into());
        }
        if let Err(e) = GuessState::new(self.p0, self.nu, self.p_max) {
            errs.push(e.to_string());
        }
        if let Some(p) = self.fixed_local_probability {
            if !(p >= T::zero() && p <= T::one()) {
                errs.push("fixed local probability must lie in [0, 1]".into());
            }
        }
        if !(self.goal_bias >= T::zero() && self.goal_bias < T::one()) {
            errs.push("goal_bias must lie in [0, 1)".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(errs.join("; ")))
        }
    }
}

/// Sampler actually used for an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Uniform over the bounds (no incumbent yet, or the uniform variant).
    Uniform,
    /// The goal configuration itself.
    Goal,
    /// Admissible informed set.
    Informed,
    /// Tube around the incumbent.
    Local,
    /// Every sampler starved; nothing was drawn.
    None,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Uniform => "uniform",
            Strategy::Goal => "goal",
            Strategy::Informed => "informed",
            Strategy::Local => "local",
            Strategy::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    Improved,
    None,
    /// The selected sampler exhausted its rejection budget.
    Starved,
}

impl Event {
    pub fn name(self) -> &'static str {
        match self {
            Event::Improved => "improved",
            Event::None => "none",
            Event::Starved => "starved",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord<T> {
    pub iteration: usize,
    pub elapsed_ms: f64,
    pub cost: T,
    pub p: T,
    pub strategy: Strategy,
    /// Informed-set measure at the current cost (infinite without a solution).
    pub measure: T,
    pub event: Event,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    BudgetExhausted,
    EarlyStop,
    InformedSetEmpty,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::BudgetExhausted => "budget_exhausted",
            Termination::EarlyStop => "early_stop",
            Termination::InformedSetEmpty => "informed_set_empty",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlanResult<T> {
    pub best_path: Option<Path<T>>,
    /// Infinite when no solution was found.
    pub best_cost: T,
    pub iterations: usize,
    pub trace: Vec<TraceRecord<T>>,
    pub termination: Termination,
    pub elapsed_ms: f64,
    pub tree_size: usize,
}

/// Step-wise planner state. [`plan`] drives it to termination; tests can
/// also step it manually and inspect the tree between iterations.
#[derive(Debug)]
pub struct Planner<'a, T> {
    problem: &'a Problem<T>,
    config: PlannerConfig<T>,
    search: RrtStar<'a, T>,
    informed: InformedSampler<T>,
    rng: RngState,
    guess: GuessState<T>,
    gamma: T,
    steer_step: T,
    incumbent: Option<Path<T>>,
    iteration: usize,
    started: Instant,
    trace: Vec<TraceRecord<T>>,
    termination: Option<Termination>,
}

impl<'a, T: Real> Planner<'a, T> {
    pub fn new(problem: &'a Problem<T>, config: PlannerConfig<T>) -> Result<Self> {
        let steer_step = config.steer_step.unwrap_or_else(|| T::of(0.1) * problem.bounds().diameter());
        let search = RrtStar::new(problem, steer_step);
        Self::build(problem, config, search, steer_step)
    }

    /// Starts with `path` already in the tree as the incumbent.
    pub fn with_initial_path(problem: &'a Problem<T>, config: PlannerConfig<T>, path: &Path<T>) -> Result<Self> {
        let steer_step = config.steer_step.unwrap_or_else(|| T::of(0.1) * problem.bounds().diameter());
        let search = RrtStar::from_path(problem, steer_step, path)?;
        Self::build(problem, config, search, steer_step)
    }

    fn build(problem: &'a Problem<T>, config: PlannerConfig<T>, search: RrtStar<'a, T>, steer_step: T) -> Result<Self> {
        config.validate()?;
        let n = problem.dim();
        let gamma = config.gamma.unwrap_or_else(|| default_gamma(problem.bounds().measure(), n));
        let guess = GuessState::new(config.p0, config.nu, config.p_max)?;
        let informed = InformedSampler::new(problem).with_budget(config.rejection_budget);
        let incumbent = search.extract_solution().ok();
        let trace = Vec::with_capacity(if config.record_trace { config.max_iterations.unwrap_or(0).min(1 << 20) } else { 0 });
        Ok(Self {
            problem,
            rng: RngState::new(config.seed),
            config,
            search,
            informed,
            guess,
            gamma,
            steer_step,
            incumbent,
            iteration: 0,
            started: Instant::now(),
            trace,
            termination: None,
        })
    }

    pub fn tree(&self) -> &Tree<T> {
        self.search.tree()
    }

    pub fn best_cost(&self) -> T {
        self.search.best_cost()
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn trace(&self) -> &[TraceRecord<T>] {
        &self.trace
    }

    pub fn termination(&self) -> Option<Termination> {
        self.termination
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Probability of drawing from the local set this iteration.
    pub fn local_probability(&self) -> T {
        match self.config.variant {
            Variant::MixedStrategyRrtStar => self.config.fixed_local_probability.unwrap_or(self.guess.p()),
            _ => T::zero(),
        }
    }

    fn phi(&self) -> T {
        let p = match (self.config.variant, self.config.phi_mode) {
            (Variant::MixedStrategyRrtStar, PhiMode::Maximum) => self.config.p_max,
            _ => self.local_probability(),
        };
        p.min(self.config.p_max)
    }

    fn draw_local(&mut self, c_k: T) -> Result<Option<Configuration<T>>> {
        let radius = local_radius(self.config.r0, c_k, self.problem.lower_bound())?;
        let path = self.incumbent.as_ref().expect("local sampling needs an incumbent");
        if !(radius > T::zero()) {
            return Ok(None);
        }
        match sample_local(&mut self.rng, path, radius, self.problem, c_k, self.config.rejection_budget) {
            Ok(x) => Ok(Some(x)),
            Err(Error::Starved { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn draw_informed(&mut self, c_k: T) -> Result<Option<Configuration<T>>> {
        match self.informed.sample(&mut self.rng, self.problem, c_k) {
            Ok(x) => Ok(Some(x)),
            Err(Error::Starved { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Picks the sampler for this iteration and draws. A starved sampler
    /// falls back to the other one.
    fn draw(&mut self, c_k: T) -> Result<(Strategy, Option<Configuration<T>>, bool)> {
        if c_k.is_infinite() {
            let u: f64 = self.rng.random();
            let goal_turn = self.config.goal_connect_every > 0 && self.iteration % self.config.goal_connect_every == 0;
            if goal_turn || T::of(u) < self.config.goal_bias {
                return Ok((Strategy::Goal, Some(self.problem.goal().clone()), false));
            }
            return Ok((Strategy::Uniform, Some(sample_uniform(&mut self.rng, self.problem.bounds())), false));
        }
        match self.config.variant {
            Variant::UniformRrtStar => Ok((Strategy::Uniform, Some(sample_uniform(&mut self.rng, self.problem.bounds())), false)),
            Variant::InformedRrtStar => {
                let x = self.draw_informed(c_k)?;
                Ok(match x {
                    Some(x) => (Strategy::Informed, Some(x), false),
                    None => (Strategy::None, None, true),
                })
            }
            Variant::MixedStrategyRrtStar => {
                let p = self.local_probability();
                let choice = select_strategy(&mut self.rng, p);
                let (first, second) = match choice {
                    SamplerChoice::Local => (Strategy::Local, Strategy::Informed),
                    SamplerChoice::Global => (Strategy::Informed, Strategy::Local),
                };
                for (i, strategy) in [first, second].into_iter().enumerate() {
                    let x = match strategy {
                        Strategy::Local => self.draw_local(c_k)?,
                        _ => self.draw_informed(c_k)?,
                    };
                    if let Some(x) = x {
                        return Ok((strategy, Some(x), i > 0));
                    }
                }
                Ok((Strategy::None, None, true))
            }
        }
    }

    /// Runs one iteration. Returns the termination reason once the run is over.
    pub fn step(&mut self) -> Result<Option<Termination>> {
        if let Some(t) = self.termination {
            return Ok(Some(t));
        }
        let c_prev = self.search.best_cost();
        if c_prev.is_finite() && self.config.variant != Variant::UniformRrtStar && c_prev <= self.problem.c_min() {
            self.termination = Some(Termination::InformedSetEmpty);
            return Ok(self.termination);
        }
        self.iteration += 1;
        let p_used = self.local_probability();
        let (strategy, sample, starved) = self.draw(c_prev)?;
        let mut event = if starved { Event::Starved } else { Event::None };
        if let Some(x) = sample {
            let radius = rewire_radius(self.search.tree().len(), self.problem.dim(), self.gamma, self.phi(), self.steer_step);
            if let ExtendOutcome::Improved(_) = self.search.extend_and_rewire(&x, radius) {
                event = Event::Improved;
                self.incumbent = Some(self.search.extract_solution()?);
            }
        }
        let c_new = self.search.best_cost();
        if c_prev.is_finite() {
            self.guess = self.guess.update(c_prev, c_new, self.problem.lower_bound())?;
        }

        if self.config.record_trace {
            let measure = if c_new.is_finite() {
                informed_set_measure(c_new, self.problem.c_min(), self.problem.dim()).unwrap_or(T::zero())
            } else {
                T::infinity()
            };
            self.trace.push(TraceRecord {
                iteration: self.iteration,
                elapsed_ms: self.started.elapsed().as_secs_f64() * 1e3,
                cost: c_new,
                p: p_used,
                strategy,
                measure,
                event,
            });
        }

        if event == Event::Improved {
            if let Some(stop) = self.config.early_stop_cost {
                if c_new < stop {
                    self.termination = Some(Termination::EarlyStop);
                    return Ok(self.termination);
                }
            }
        }
        let out_of_iterations = self.config.max_iterations.is_some_and(|m| self.iteration >= m);
        let out_of_time = self.config.max_wall_time.is_some_and(|d| self.started.elapsed() >= d);
        if out_of_iterations || out_of_time {
            self.termination = Some(Termination::BudgetExhausted);
        }
        Ok(self.termination)
    }

    pub fn finish(self) -> PlanResult<T> {
        PlanResult {
            best_cost: self.search.best_cost(),
            best_path: self.incumbent,
            iterations: self.iteration,
            trace: self.trace,
            termination: self.termination.unwrap_or(Termination::BudgetExhausted),
            elapsed_ms: self.started.elapsed().as_secs_f64() * 1e3,
            tree_size: self.search.tree().len(),
        }
    }

    pub fn run(mut self) -> Result<PlanResult<T>> {
        while self.step()?.is_none() {}
        Ok(self.finish())
    }
}

/// Runs the planner to termination.
pub fn plan<T: Real>(problem: &Problem<T>, config: &PlannerConfig<T>) -> Result<PlanResult<T>> {
    Planner::new(problem, config.clone())?.run()
}

/// Header of the per-run trace CSV.
pub const TRACE_HEADER: &str = "iteration,elapsed_ms,cost,p,strategy,measure,event";

fn fmt_num<T: Real>(x: T) -> String {
    let v = x.as_f64();
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

/// Writes a trace as CSV. With `include_elapsed = false` the wall-time
/// column is left empty so the output is reproducible byte for byte.
pub fn write_trace_csv<T: Real, W: Write>(mut w: W, trace: &[TraceRecord<T>], include_elapsed: bool) -> Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for r in trace {
        let elapsed = if include_elapsed { format!("{:.3}", r.elapsed_ms) } else { String::new() };
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.iteration,
            elapsed,
            fmt_num(r.cost),
            fmt_num(r.p),
            r.strategy.name(),
            fmt_num(r.measure),
            r.event.name()
        )?;
    }
    Ok(())
}

/// File name for a run's trace: `<problem>_<variant>_<seed>.csv`.
pub fn trace_file_name(problem: &str, variant: Variant, seed: u64) -> String {
    format!("{problem}_{}_{seed}.csv", variant.name())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Bounds, Obstacle};

    fn c(v: &[f64]) -> Configuration<f64> {
        Configuration::from_f64(v).unwrap()
    }

    fn empty_world() -> Problem<f64> {
        Problem::new(Bounds::cube(2, 0.0, 10.0).unwrap(), vec![], c(&[1.0, 1.0]), c(&[8.0, 6.0])).unwrap()
    }

    fn wall_world() -> Problem<f64> {
        Problem::new(
            Bounds::cube(2, 0.0, 10.0).unwrap(),
            vec![Obstacle::AxisAlignedBox { min: c(&[4.5, 0.0]), max: c(&[5.5, 7.0]) }],
            c(&[2.0, 2.0]),
            c(&[8.0, 2.0]),
        )
        .unwrap()
    }

    #[test]
    fn variant_names_round_trip() {
        for v in [Variant::UniformRrtStar, Variant::InformedRrtStar, Variant::MixedStrategyRrtStar] {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("rrt".parse::<Variant>().is_err());
    }

    #[test]
    fn directly_connectable_goal_is_solved_straight() {
        // c_min is below the default steering step, so a goal sample can
        // connect the root straight to the goal.
        let p = Problem::new(Bounds::cube(2, 0.0, 10.0).unwrap(), vec![], c(&[4.0, 4.0]), c(&[5.0, 4.5])).unwrap();
        for variant in [Variant::UniformRrtStar, Variant::InformedRrtStar, Variant::MixedStrategyRrtStar] {
            let cfg = PlannerConfig::new(variant).with_seed(3).with_max_iterations(500);
            let r = plan(&p, &cfg).unwrap();
            let first = r.trace.iter().find(|t| t.cost.is_finite()).expect("solution found");
            assert!(first.iteration < 300, "{variant}: first solution at {}", first.iteration);
            assert!(first.cost <= 1.001 * p.c_min(), "{variant}: {}", first.cost);
        }
    }

    #[test]
    fn empty_world_converges_to_straight_line() {
        let p = empty_world();
        for (variant, tol) in
            [(Variant::UniformRrtStar, 1.01), (Variant::InformedRrtStar, 1.001), (Variant::MixedStrategyRrtStar, 1.001)]
        {
            let cfg = PlannerConfig::new(variant).with_seed(3).with_max_iterations(3000);
            let r = plan(&p, &cfg).unwrap();
            let first = r.trace.iter().position(|t| t.cost.is_finite()).expect("solution found");
            assert!(first < 300, "{variant}: first solution at {first}");
            assert!(r.best_cost <= tol * p.c_min(), "{variant}: {}", r.best_cost);
        }
    }

    #[test]
    fn trace_is_monotone_and_one_row_per_iteration() {
        let p = wall_world();
        let cfg = PlannerConfig::new(Variant::MixedStrategyRrtStar).with_seed(11).with_max_iterations(3000);
        let r = plan(&p, &cfg).unwrap();
        assert_eq!(r.trace.len(), r.iterations);
        for (i, w) in r.trace.windows(2).enumerate() {
            assert!(w[1].cost <= w[0].cost);
            assert_eq!(w[0].iteration, i + 1);
        }
        assert_eq!(r.trace.last().unwrap().cost, r.best_cost);
        assert!(r.trace.iter().all(|t| t.p <= 0.99 && t.p >= 0.0));
        let path = r.best_path.unwrap();
        for w in path.waypoints().windows(2) {
            assert!(!p.edge_in_collision(&w[0], &w[1]));
        }
        assert!((path.cost() - r.best_cost).abs() < 1e-9);
    }

    #[test]
    fn informed_variant_pins_p_to_zero() {
        let p = wall_world();
        let cfg = PlannerConfig::new(Variant::InformedRrtStar).with_seed(2).with_max_iterations(1000);
        let r = plan(&p, &cfg).unwrap();
        assert!(r.trace.iter().all(|t| t.p == 0.0 && t.strategy != Strategy::Local));
    }

    #[test]
    fn early_stop_triggers() {
        let p = wall_world();
        let cfg = PlannerConfig::new(Variant::MixedStrategyRrtStar).with_seed(5).with_max_iterations(50_000).with_early_stop(20.0);
        let r = plan(&p, &cfg).unwrap();
        assert_eq!(r.termination, Termination::EarlyStop);
        assert!(r.best_cost < 20.0);
        assert_eq!(r.trace.last().unwrap().event, Event::Improved);
    }

    #[test]
    fn same_seed_same_trace() {
        let p = wall_world();
        let cfg = PlannerConfig::new(Variant::MixedStrategyRrtStar).with_seed(21).with_max_iterations(1500);
        let render = |r: &PlanResult<f64>| {
            let mut buf = Vec::new();
            write_trace_csv(&mut buf, &r.trace, false).unwrap();
            buf
        };
        let a = plan(&p, &cfg).unwrap();
        let b = plan(&p, &cfg).unwrap();
        assert_eq!(render(&a), render(&b));
        let other = plan(&p, &cfg.clone().with_seed(22)).unwrap();
        assert_ne!(render(&a), render(&other));
    }

    #[test]
    fn invalid_config_rejected() {
        let p = empty_world();
        let mut cfg = PlannerConfig::new(Variant::MixedStrategyRrtStar);
        cfg.max_iterations = None;
        assert!(plan(&p, &cfg).is_err());
        let mut cfg = PlannerConfig::new(Variant::MixedStrategyRrtStar);
        cfg.nu = 1.0;
        assert!(plan(&p, &cfg).is_err());
    }

    #[test]
    fn trace_csv_format() {
        let rec = TraceRecord {
            iteration: 1,
            elapsed_ms: 0.5,
            cost: f64::INFINITY,
            p: 0.1,
            strategy: Strategy::Uniform,
            measure: f64::INFINITY,
            event: Event::None,
        };
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &[rec], true).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "iteration,elapsed_ms,cost,p,strategy,measure,event\n1,0.500,inf,0.1,uniform,inf,none\n");
        assert_eq!(trace_file_name("np2", Variant::MixedStrategyRrtStar, 7), "np2_mi_7.csv");
    }

    #[test]
    fn f32_planner_runs() {
        let p: Problem<f32> = Problem::new(
            Bounds::cube(2, 0.0, 10.0).unwrap(),
            vec![],
            Configuration::new(vec![1.0, 1.0]).unwrap(),
            Configuration::new(vec![8.0, 6.0]).unwrap(),
        )
        .unwrap();
        let r = plan(&p, &PlannerConfig::new(Variant::MixedStrategyRrtStar).with_max_iterations(500)).unwrap();
        assert!(r.best_cost.is_finite());
    }
}
