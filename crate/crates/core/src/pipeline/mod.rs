//! Scenario runs: simulation, sensing chain and evaluation against ground truth.

mod bench;
mod run;
mod spec;
mod suite;

pub use bench::{bench_acceleration, BenchRow};
pub use run::{
    run_scenario, run_scenario_with, Artifacts, RunOptions, RunOutput, RunReport, Stage, StageTiming, TargetReport,
};
pub use spec::{PipelineParams, ScenarioSpec};
pub use suite::{percentile, run_suite, write_suite_csv, MetricSummary, SuiteResult};

/// Independent seed for stream `stream` of a run seeded with `seed`.
pub(crate) fn sub_seed(seed: u64, stream: u64) -> u64 {
    seed.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}
