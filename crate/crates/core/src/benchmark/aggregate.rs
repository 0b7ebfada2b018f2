use std::collections::BTreeMap;
use std::io::Write;

use super::sweep::{Parameter, RunRecord};
use crate::error::Result;
use crate::planner::Variant;

/// Nearest-rank percentile: the smallest value whose rank is at least
/// `ceil(q N)`. `values` must be sorted ascending and nonempty.
pub fn nearest_rank(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "nearest_rank of an empty sample");
    let n = values.len();
    let rank = ((q * n as f64) - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    values[rank - 1]
}

/// Identifies one (parameter value, dimension, variant) cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupKey {
    pub parameter: Parameter,
    pub value: f64,
    pub n: usize,
    pub variant: Variant,
}

impl GroupKey {
    pub fn of(r: &RunRecord) -> Self {
        Self { parameter: r.parameter, value: r.value, n: r.n, variant: r.variant }
    }

    fn sort_key(&self) -> (Parameter, usize, Variant, u64) {
        (self.parameter, self.n, self.variant, self.value.to_bits())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub key: GroupKey,
    pub runs: usize,
    /// Fraction of runs that reached the threshold before the cap.
    pub success_rate: f64,
    /// `(q, value)` pairs over iterations-to-threshold; capped runs count at
    /// the cap.
    pub quantiles: Vec<(f64, f64)>,
}

impl SummaryRow {
    pub fn quantile(&self, q: f64) -> Option<f64> {
        self.quantiles.iter().find(|(k, _)| (k - q).abs() < 1e-12).map(|&(_, v)| v)
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5).expect("median requested")
    }

    pub fn p10(&self) -> f64 {
        self.quantile(0.1).expect("p10 requested")
    }

    pub fn p90(&self) -> f64 {
        self.quantile(0.9).expect("p90 requested")
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Aggregation {
    pub rows: Vec<SummaryRow>,
    /// Groups omitted because none of their runs completed.
    pub warnings: Vec<String>,
}

pub const DEFAULT_QUANTILES: [f64; 3] = [0.5, 0.1, 0.9];

/// Groups records by (parameter, value, n, variant) and computes
/// nearest-rank percentiles of iterations-to-threshold. Failed runs are
/// left out; a group with no completed run is omitted with a warning.
/// Output order is independent of record order.
pub fn aggregate_percentiles(records: &[RunRecord], quantiles: &[f64]) -> Aggregation {
    let mut groups: BTreeMap<(Parameter, usize, Variant, u64), (GroupKey, Vec<&RunRecord>)> = BTreeMap::new();
    for r in records {
        let key = GroupKey::of(r);
        groups.entry(key.sort_key()).or_insert_with(|| (key, Vec::new())).1.push(r);
    }
    let mut out = Aggregation::default();
    for (_, (key, members)) in groups {
        let ok: Vec<&RunRecord> = members.iter().copied().filter(|r| r.error.is_none()).collect();
        if ok.is_empty() {
            out.warnings.push(format!(
                "group {}={} n={} {} has no completed runs; omitted",
                key.parameter.name(),
                key.value,
                key.n,
                key.variant
            ));
            continue;
        }
        let mut values: Vec<f64> = ok.iter().map(|r| r.iterations as f64).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let successes = ok.iter().filter(|r| r.reached).count();
        out.rows.push(SummaryRow {
            key,
            runs: ok.len(),
            success_rate: successes as f64 / ok.len() as f64,
            quantiles: quantiles.iter().map(|&q| (q, nearest_rank(&values, q))).collect(),
        });
    }
    out
}

pub const SUMMARY_HEADER: &str = "parameter,value,n,variant,runs,success_rate,median,p10,p90";

pub fn write_summary_csv<W: Write>(w: W, rows: &[SummaryRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SUMMARY_HEADER.split(','))?;
    for r in rows {
        out.write_record([
            r.key.parameter.name().to_string(),
            r.key.value.to_string(),
            r.key.n.to_string(),
            r.key.variant.name().to_string(),
            r.runs.to_string(),
            r.success_rate.to_string(),
            r.quantile(0.5).map_or(String::new(), |v| v.to_string()),
            r.quantile(0.1).map_or(String::new(), |v| v.to_string()),
            r.quantile(0.9).map_or(String::new(), |v| v.to_string()),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(iterations: usize, reached: bool) -> RunRecord {
        RunRecord {
            parameter: Parameter::R0,
            value: 0.02,
            n: 2,
            variant: Variant::MixedStrategyRrtStar,
            repetition: 0,
            seed: 0,
            iterations,
            reached,
            final_cost: 1.0,
            wall_ms: 0.0,
            error: None,
        }
    }

    #[test]
    fn single_record_group() {
        let agg = aggregate_percentiles(&[record(42, true)], &DEFAULT_QUANTILES);
        assert_eq!(agg.rows.len(), 1);
        let r = &agg.rows[0];
        assert_eq!((r.median(), r.p10(), r.p90()), (42.0, 42.0, 42.0));
    }

    #[test]
    fn nearest_rank_definition() {
        let v: Vec<f64> = (1..=100).map(|x| x as f64).collect();
        assert_eq!(nearest_rank(&v, 0.9), 90.0);
        assert_eq!(nearest_rank(&v, 0.5), 50.0);
        assert_eq!(nearest_rank(&v, 0.0), 1.0);
        assert_eq!(nearest_rank(&v, 1.0), 100.0);
        assert_eq!(nearest_rank(&[5.0, 7.0], 0.1), 5.0);
        assert_eq!(nearest_rank(&[5.0, 7.0], 0.9), 7.0);
    }

    #[test]
    fn censored_group() {
        let cap = 1000;
        let mut recs: Vec<RunRecord> = (1..=7).map(|i| record(i * 10, true)).collect();
        recs.extend((0..3).map(|_| record(cap, false)));
        let agg = aggregate_percentiles(&recs, &DEFAULT_QUANTILES);
        let r = &agg.rows[0];
        assert!((r.success_rate - 0.7).abs() < 1e-12);
        assert_eq!(r.p90(), cap as f64);
    }

    #[test]
    fn failed_groups_are_omitted() {
        let mut bad = record(5, false);
        bad.error = Some("boom".into());
        bad.n = 3;
        let agg = aggregate_percentiles(&[record(1, true), bad], &DEFAULT_QUANTILES);
        assert_eq!(agg.rows.len(), 1);
        assert_eq!(agg.warnings.len(), 1);
    }

    #[test]
    fn order_independent() {
        let mut recs = Vec::new();
        for (i, n) in [2usize, 3, 2, 3, 2].iter().enumerate() {
            let mut r = record(i * 7 + 1, true);
            r.n = *n;
            recs.push(r);
        }
        let a = aggregate_percentiles(&recs, &DEFAULT_QUANTILES);
        recs.reverse();
        let b = aggregate_percentiles(&recs, &DEFAULT_QUANTILES);
        assert_eq!(a, b);
    }
}
