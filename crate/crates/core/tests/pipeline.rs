mod common;

use vsense_core::pipeline::{percentile, run_scenario, run_suite, write_suite_csv, Stage};
use vsense_core::ScenarioSpec;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn rr_errors(specs: impl Iterator<Item = ScenarioSpec>) -> Vec<f64> {
    specs
        .map(|s| {
            let out = run_scenario(&s);
            assert!(out.report.ok, "{:?}", out.report.error);
            // A missing estimate counts as a full-band miss.
            out.report.targets[0].rr_error_rpm.unwrap_or(30.0)
        })
        .collect()
}

#[test]
fn clean_scene_within_bounds_and_localized() {
    for seed in [3, 4] {
        let out = run_scenario(&common::clean(seed));
        assert!(out.report.ok);
        let t = &out.report.targets[0];
        assert!(t.rr_error_rpm.unwrap() <= 0.5, "{t:?}");
        assert!(t.hr_error_bpm.unwrap() <= 6.0, "{t:?}");
        assert!(t.range_bin_error <= 1, "{t:?}");
        assert!(t.angle_bin_error.unwrap() <= 1, "{t:?}");
        assert!((t.channel_weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn body_motion_burst_is_tolerated() {
    let out = run_scenario(&common::body_motion(2));
    let t = &out.report.targets[0];
    assert!(t.rr_error_rpm.unwrap() <= 0.5, "{t:?}");
    assert!(t.hr_error_bpm.unwrap() <= 6.0, "{t:?}");
}

#[test]
fn beamforming_suppresses_range_overlapping_mover() {
    let seeds = 0..3;
    let on = rr_errors(seeds.clone().map(|s| common::range_overlap(s, true)));
    let off = rr_errors(seeds.map(|s| common::range_overlap(s, false)));
    assert!(on.iter().all(|&e| e <= 0.5), "{on:?}");
    assert!(median(off) > median(on.clone()), "on {on:?}");
}

#[test]
fn same_seed_gives_identical_report_bytes() {
    let spec = common::range_overlap(9, true);
    let a = serde_json::to_vec(&run_scenario(&spec).report).unwrap();
    let b = serde_json::to_vec(&run_scenario(&spec).report).unwrap();
    assert_eq!(a, b);
    let other = serde_json::to_vec(&run_scenario(&spec.with_seed(10)).report).unwrap();
    assert_ne!(a, other);
}

#[test]
fn stage_timings_cover_the_chain() {
    let out = run_scenario(&common::clean(1));
    let stages: Vec<Stage> = out.timings.iter().map(|t| t.stage).collect();
    assert_eq!(stages.first(), Some(&Stage::Config));
    assert_eq!(stages.last(), Some(&Stage::Rates));
    assert!(stages.contains(&Stage::Vmd));
    let sum: f64 = out.timings.iter().map(|t| t.ms).sum();
    assert!(sum <= out.total_ms);
}

#[test]
fn report_json_has_expected_shape() {
    let out = run_scenario(&common::clean(2));
    let v: serde_json::Value = serde_json::to_value(&out.report).unwrap();
    for key in [
        "scenario",
        "seed",
        "beamforming",
        "ok",
        "failed_stage",
        "error",
        "targets",
        "config",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let t = &v["targets"][0];
    for key in [
        "id",
        "est_rr_rpm",
        "est_hr_bpm",
        "rr_error_rpm",
        "hr_error_bpm",
        "location",
        "mode_count",
        "center_freqs_hz",
        "channel_weights",
    ] {
        assert!(t.get(key).is_some(), "missing targets[0].{key}");
    }
    assert_eq!(v["failed_stage"], serde_json::Value::Null);
    let back: vsense_core::RunReport = serde_json::from_value(v).unwrap();
    assert_eq!(back, out.report);
}

#[test]
fn suite_percentiles_and_csv() {
    let mut spec = common::clean(100);
    spec.repetitions = 6;
    let result = run_suite(&[spec]);
    assert_eq!(result.runs.len(), 6);
    assert_eq!(result.failures, 0);
    assert_eq!(result.rr.errors.len(), 6);
    assert!(result.rr.p90.unwrap() <= 0.5);
    assert!(result.hr.p90.unwrap() <= 6.0);
    assert_eq!(result.rr.p90, percentile(&result.rr.errors, 0.9));

    let dir = tempfile::tempdir().unwrap();
    write_suite_csv(&result, dir.path()).unwrap();
    let cdf = std::fs::read_to_string(dir.path().join("cdf.csv")).unwrap();
    assert_eq!(cdf.lines().next(), Some("metric,rank,error,cdf"));
    assert_eq!(cdf.lines().count(), 1 + 12);
    let pct = std::fs::read_to_string(dir.path().join("percentiles.csv")).unwrap();
    assert!(pct.starts_with("metric,count,failures,p50,p80,p90\n"));
}
