use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn vsense(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vsense")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_report_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = vsense(&[
        "run",
        "--scenario",
        path(&scenario("clean.json")),
        "--out",
        path(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in [
        "report.json",
        "timings.json",
        "heatmap.csv",
        "detections.jsonl",
        "vmd_trace_0.csv",
    ] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
    let heatmap = std::fs::read_to_string(dir.path().join("heatmap.csv")).unwrap();
    assert_eq!(heatmap.lines().next(), Some("range_bin,angle_bin,power"));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("target-0"), "{stdout}");
}

#[test]
fn overrides_and_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let out = vsense(&[
        "run",
        "--scenario",
        path(&scenario("range_overlap.json")),
        "--out",
        path(dir.path()),
        "--seed",
        "3",
        "--n-keep",
        "120",
        "--compare-beamforming",
    ]);
    assert!(out.status.success());
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(report.contains("\"seed\": 3"));
    assert!(report.contains("\"n_keep\": 120"));
    let cmp = std::fs::read_to_string(dir.path().join("comparison.json")).unwrap();
    assert!(cmp.contains("rr_error_bf_off"));
    let off = std::fs::read_to_string(dir.path().join("no_beamforming/report.json")).unwrap();
    assert!(off.contains("\"beamforming\": false"));
}

#[test]
fn failed_stage_gives_nonzero_exit_and_labelled_report() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("none.jsonl");
    std::fs::write(&empty, "").unwrap();
    let out = vsense(&[
        "run",
        "--scenario",
        path(&scenario("clean.json")),
        "--out",
        path(dir.path()),
        "--detections",
        path(&empty),
    ]);
    assert!(!out.status.success());
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(report.contains("\"failed_stage\": \"fusion\""), "{report}");
}

#[test]
fn invalid_scenario_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"name": "x", "scene": {"duration_s": 10.0}, "snr_db": 20.0}"#).unwrap();
    let out = vsense(&["run", "--scenario", path(&bad), "--out", path(dir.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn dump_cube_writes_binary_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("short.json");
    std::fs::write(
        &spec,
        r#"{"name": "short", "snr_db": 20.0, "seed": 1,
            "scene": {"duration_s": 20.0, "targets": [{"range_m": 2.0, "angle_deg": 30.0, "amplitude": 1.0,
                       "vitals": {"breath_freq_hz": 0.25, "heart_freq_hz": 1.2}}]}}"#,
    )
    .unwrap();
    let out = vsense(&[
        "run",
        "--scenario",
        path(&spec),
        "--out",
        path(dir.path()),
        "--dump-cube",
    ]);
    assert!(out.status.success());
    let bin = std::fs::metadata(dir.path().join("cube.bin")).unwrap().len();
    // 512 samples, 400 chirps, 8 channels, 8 bytes each.
    assert_eq!(bin, 512 * 400 * 8 * 8);
    assert!(dir.path().join("cube.bin.json").is_file());
}

#[test]
fn suite_over_a_directory() {
    let dir = tempfile::tempdir().unwrap();
    let scenarios = dir.path().join("scenarios");
    std::fs::create_dir(&scenarios).unwrap();
    std::fs::copy(scenario("clean.json"), scenarios.join("clean.json")).unwrap();
    std::fs::copy(scenario("body_motion.json"), scenarios.join("body_motion.json")).unwrap();
    let out_dir = dir.path().join("out");
    let out = vsense(&[
        "suite",
        "--scenario",
        path(&scenarios),
        "--out",
        path(&out_dir),
        "--repetitions",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cdf = std::fs::read_to_string(out_dir.join("cdf.csv")).unwrap();
    assert_eq!(cdf.lines().count(), 1 + 2 * 4);
    let pct = std::fs::read_to_string(out_dir.join("percentiles.csv")).unwrap();
    assert_eq!(pct.lines().count(), 3);
}

#[test]
fn bench_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = vsense(&[
        "bench",
        "--scenario",
        path(&scenario("bench.json")),
        "--out",
        path(dir.path()),
        "--n-keep",
        "100,200",
        "--repetitions",
        "2",
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("501,501,"));
    assert!(lines[1].split(',').nth(3) == Some("1"));
}

#[test]
fn pattern_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = vsense(&[
        "pattern",
        "--role",
        "tx",
        "--steer",
        "-20",
        "--step",
        "1",
        "--out",
        path(dir.path()),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("pattern_tx.csv")).unwrap();
    let rows: Vec<(f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let (a, g) = l.split_once(',').unwrap();
            (a.parse().unwrap(), g.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 181);
    let peak = rows.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert!(peak.1.abs() < 1e-9);
    let at = |deg: f64| rows.iter().find(|r| r.0 == deg).unwrap().1;
    assert!(at(-20.0).abs() < 1e-9);
}
