use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_scenario, RunReport, ScenarioSpec};
use crate::error::Result;

/// Sorted absolute errors of one metric with their percentiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub metric: String,
    pub errors: Vec<f64>,
    pub p50: Option<f64>,
    pub p80: Option<f64>,
    pub p90: Option<f64>,
}

impl MetricSummary {
    pub fn new(metric: &str, mut errors: Vec<f64>) -> Self {
        errors.sort_by(f64::total_cmp);
        Self {
            metric: metric.into(),
            p50: percentile(&errors, 0.5),
            p80: percentile(&errors, 0.8),
            p90: percentile(&errors, 0.9),
            errors,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub runs: Vec<RunReport>,
    pub rr: MetricSummary,
    pub hr: MetricSummary,
    /// Runs that failed a stage or produced no rate; excluded from the CDFs.
    pub failures: usize,
}

/// Nearest-rank percentile of sorted `values`.
pub fn percentile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

/// Runs every spec `repetitions` times with seeds `seed, seed + 1, ...` in
/// parallel and aggregates the per-target absolute errors.
pub fn run_suite(specs: &[ScenarioSpec]) -> SuiteResult {
    let jobs: Vec<ScenarioSpec> = specs
        .iter()
        .flat_map(|s| (0..s.repetitions as u64).map(move |i| s.with_seed(s.seed.wrapping_add(i))))
        .collect();
    let runs: Vec<RunReport> = jobs.par_iter().map(|s| run_scenario(s).report).collect();
    let mut rr = Vec::new();
    let mut hr = Vec::new();
    let mut failures = 0;
    for run in &runs {
        let complete = run.ok
            && !run.targets.is_empty()
            && run
                .targets
                .iter()
                .all(|t| t.rr_error_rpm.is_some() && t.hr_error_bpm.is_some());
        if !complete {
            failures += 1;
            continue;
        }
        for t in &run.targets {
            rr.extend(t.rr_error_rpm);
            hr.extend(t.hr_error_bpm);
        }
    }
    SuiteResult {
        runs,
        rr: MetricSummary::new("rr_error_rpm", rr),
        hr: MetricSummary::new("hr_error_bpm", hr),
        failures,
    }
}

/// Writes `cdf.csv` (metric, rank, error, cdf) and `percentiles.csv`
/// (metric, count, failures, p50, p80, p90) into `dir`.
pub fn write_suite_csv(result: &SuiteResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut cdf = std::io::BufWriter::new(std::fs::File::create(dir.join("cdf.csv"))?);
    writeln!(cdf, "metric,rank,error,cdf")?;
    let mut table = std::io::BufWriter::new(std::fs::File::create(dir.join("percentiles.csv"))?);
    writeln!(table, "metric,count,failures,p50,p80,p90")?;
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for m in [&result.rr, &result.hr] {
        let n = m.errors.len();
        for (i, e) in m.errors.iter().enumerate() {
            writeln!(cdf, "{},{},{},{}", m.metric, i + 1, e, (i + 1) as f64 / n as f64)?;
        }
        if n > 0 {
            writeln!(
                table,
                "{},{},{},{},{},{}",
                m.metric,
                n,
                result.failures,
                fmt(m.p50),
                fmt(m.p80),
                fmt(m.p90)
            )?;
        }
    }
    cdf.flush()?;
    table.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_nearest_rank() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(percentile(&v, 0.5), Some(5.0));
        assert_eq!(percentile(&v, 0.8), Some(8.0));
        assert_eq!(percentile(&v, 0.9), Some(9.0));
        assert_eq!(percentile(&v, 0.0), Some(1.0));
        assert_eq!(percentile(&[], 0.5), None);
    }

    #[test]
    fn empty_suite_writes_headers_only() {
        let result = SuiteResult {
            runs: vec![],
            rr: MetricSummary::new("rr_error_rpm", vec![]),
            hr: MetricSummary::new("hr_error_bpm", vec![]),
            failures: 0,
        };
        let dir = tempfile::tempdir().unwrap();
        write_suite_csv(&result, dir.path()).unwrap();
        assert_eq!(
            std::fs::read_to_string(dir.path().join("cdf.csv")).unwrap(),
            "metric,rank,error,cdf\n"
        );
        assert_eq!(
            std::fs::read_to_string(dir.path().join("percentiles.csv")).unwrap(),
            "metric,count,failures,p50,p80,p90\n"
        );
    }

    #[test]
    fn summary_sorts_errors() {
        let m = MetricSummary::new("x", vec![3.0, 1.0, 2.0]);
        assert_eq!(m.errors, vec![1.0, 2.0, 3.0]);
        assert_eq!(m.p50, Some(2.0));
    }
}
