//! Narrow-passage study: problem generator with analytic minima, seeded
//! parameter sweeps, and nearest-rank percentile summaries.

mod aggregate;
mod narrow_passage;
mod sweep;

pub use aggregate::{
    aggregate_percentiles, nearest_rank, write_summary_csv, Aggregation, GroupKey, SummaryRow, DEFAULT_QUANTILES,
    SUMMARY_HEADER,
};
pub use narrow_passage::{analytic_minima, make_narrow_passage, AnalyticMinima, NarrowPassageSpec};
pub use sweep::{run_benchmark, run_seed, write_runs_csv, Parameter, RunRecord, SweepSpec, RUNS_HEADER};
