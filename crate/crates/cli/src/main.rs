use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use vsense_core::beamform::{beam_pattern, combined_pattern, pattern_grid, rx_weights, tx_weights, write_pattern_csv};
use vsense_core::fusion::{read_detections_jsonl, write_detections_jsonl};
use vsense_core::pipeline::{bench_acceleration, run_scenario_with, run_suite, write_suite_csv, RunOptions, RunOutput};
use vsense_core::{RadarConfig, ScenarioSpec};

#[derive(Parser)]
#[command(name = "vsense", version, about = "Radar + camera vital-sign sensing harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its report and plot data.
    Run(RunArgs),
    /// Run scenarios repeatedly and write error CDF tables.
    Suite(SuiteArgs),
    /// Time the decomposition against spectrum truncation size.
    Bench(BenchArgs),
    /// Dump a Tx, Rx or combined beam pattern.
    Pattern(PatternArgs),
}

#[derive(Args)]
struct Overrides {
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Disable Tx/Rx beamforming and use a single receive element.
    #[arg(long)]
    no_beamforming: bool,
    /// Number of spectrum bins kept for the decomposition.
    #[arg(long)]
    n_keep: Option<usize>,
}

impl Overrides {
    fn apply(&self, spec: &mut ScenarioSpec) {
        if let Some(seed) = self.seed {
            spec.seed = seed;
        }
        if self.no_beamforming {
            spec.pipeline.beamforming = false;
        }
        if let Some(n) = self.n_keep {
            spec.pipeline.n_keep = Some(n);
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
    /// Also run with beamforming off and write a comparison.
    #[arg(long)]
    compare_beamforming: bool,
    /// Write the simulated cube as cube.bin (+ cube.bin.json).
    #[arg(long)]
    dump_cube: bool,
    /// Use recorded camera detections (JSON lines) instead of the simulated camera.
    #[arg(long)]
    detections: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Scenario file or directory of scenario files.
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
    /// Override the repetition count of every scenario.
    #[arg(long)]
    repetitions: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    no_beamforming: bool,
    /// Truncation sizes to time; repeat or comma-separate.
    #[arg(long, value_delimiter = ',', default_values_t = [50usize, 100, 200])]
    n_keep: Vec<usize>,
    /// Timing repetitions per size.
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Role {
    Tx,
    Rx,
    Combined,
}

#[derive(Args)]
struct PatternArgs {
    #[arg(long, value_enum, default_value_t = Role::Combined)]
    role: Role,
    /// Steering angle (deg).
    #[arg(long, default_value_t = 30.0, allow_hyphen_values = true)]
    steer: f64,
    /// Angular step of the dump (deg).
    #[arg(long, default_value_t = 0.25)]
    step: f64,
    /// Radar configuration to take array geometry from; defaults otherwise.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load(path: &Path) -> Result<ScenarioSpec> {
    ScenarioSpec::load(path).with_context(|| format!("loading scenario {}", path.display()))
}

#[derive(Serialize)]
struct Timings<'a> {
    stages: &'a [vsense_core::pipeline::StageTiming],
    total_ms: f64,
}

fn write_run(out: &RunOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_json(&dir.join("report.json"), &out.report)?;
    write_json(
        &dir.join("timings.json"),
        &Timings {
            stages: &out.timings,
            total_ms: out.total_ms,
        },
    )?;
    let a = &out.artifacts;
    if let Some(h) = &a.heatmap {
        h.write_csv(&dir.join("heatmap.csv"))?;
    }
    if !a.detections.is_empty() {
        write_detections_jsonl(&dir.join("detections.jsonl"), &a.detections)?;
    }
    for (i, m) in a.modes.iter().enumerate() {
        m.write_trace_csv(&dir.join(format!("vmd_trace_{i}.csv")))?;
    }
    if let Some(cube) = &a.cube {
        cube.write_binary(&dir.join("cube.bin"))?;
    }
    Ok(())
}

fn summarize(out: &RunOutput) {
    let r = &out.report;
    if !r.ok {
        eprintln!(
            "{}: failed at {:?}: {}",
            r.scenario,
            r.failed_stage,
            r.error.as_deref().unwrap_or("")
        );
        return;
    }
    for t in &r.targets {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
        println!(
            "{} {}: rr {} rpm (err {}), hr {} bpm (err {}), bin ({}, {}), {:.0} ms",
            r.scenario,
            t.id,
            fmt(t.est_rr_rpm),
            fmt(t.rr_error_rpm),
            fmt(t.est_hr_bpm),
            fmt(t.hr_error_bpm),
            t.location.range_bin,
            t.location.angle_bin,
            out.total_ms
        );
    }
}

#[derive(Serialize)]
struct Comparison {
    target: String,
    rr_error_bf_on: Option<f64>,
    rr_error_bf_off: Option<f64>,
    hr_error_bf_on: Option<f64>,
    hr_error_bf_off: Option<f64>,
}

fn cmd_run(args: &RunArgs) -> Result<bool> {
    let mut spec = load(&args.scenario)?;
    args.overrides.apply(&mut spec);
    let opts = RunOptions {
        keep_cube: args.dump_cube,
        detections: match &args.detections {
            Some(p) => Some(read_detections_jsonl(p).with_context(|| format!("reading {}", p.display()))?),
            None => None,
        },
    };
    let out = run_scenario_with(&spec, &opts);
    write_run(&out, &args.out)?;
    summarize(&out);
    let mut ok = out.report.ok;

    if args.compare_beamforming && spec.pipeline.beamforming {
        let mut off_spec = spec.clone();
        off_spec.pipeline.beamforming = false;
        let off = run_scenario_with(
            &off_spec,
            &RunOptions {
                keep_cube: false,
                ..opts
            },
        );
        write_run(&off, &args.out.join("no_beamforming"))?;
        summarize(&off);
        ok &= off.report.ok;
        let rows: Vec<Comparison> = out
            .report
            .targets
            .iter()
            .map(|on| {
                let other = off.report.targets.iter().find(|t| t.id == on.id);
                Comparison {
                    target: on.id.clone(),
                    rr_error_bf_on: on.rr_error_rpm,
                    rr_error_bf_off: other.and_then(|t| t.rr_error_rpm),
                    hr_error_bf_on: on.hr_error_bpm,
                    hr_error_bf_off: other.and_then(|t| t.hr_error_bpm),
                }
            })
            .collect();
        write_json(&args.out.join("comparison.json"), &rows)?;
    }
    Ok(ok)
}

fn scenario_files(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .with_context(|| format!("reading {}", path.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no scenario files in {}", path.display());
    }
    Ok(files)
}

fn cmd_suite(args: &SuiteArgs) -> Result<bool> {
    let specs = scenario_files(&args.scenario)?
        .iter()
        .map(|p| {
            let mut s = load(p)?;
            args.overrides.apply(&mut s);
            if let Some(n) = args.repetitions {
                s.repetitions = n;
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let result = run_suite(&specs);
    write_suite_csv(&result, &args.out)?;
    write_json(&args.out.join("runs.json"), &result.runs)?;
    for m in [&result.rr, &result.hr] {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3}"));
        println!(
            "{}: n={} p50={} p80={} p90={}",
            m.metric,
            m.errors.len(),
            fmt(m.p50),
            fmt(m.p80),
            fmt(m.p90)
        );
    }
    println!("failures: {}", result.failures);
    Ok(result.failures == 0)
}

fn cmd_bench(args: &BenchArgs) -> Result<bool> {
    let mut spec = load(&args.scenario)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if args.no_beamforming {
        spec.pipeline.beamforming = false;
    }
    let rows = bench_acceleration(&spec, &args.n_keep, args.repetitions.max(1))?;
    fs::create_dir_all(&args.out)?;
    write_json(&args.out.join("bench.json"), &rows)?;
    let mut csv = String::from("n_keep,full_bins,median_ms,speedup,iterations,rr_error_rpm,hr_error_bpm\n");
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n_keep,
            r.full_bins,
            r.median_ms,
            r.speedup,
            r.iterations,
            fmt(r.rr_error_rpm),
            fmt(r.hr_error_bpm)
        ));
        println!(
            "n_keep {:>5}: {:>8.3} ms  x{:<6.2} {:>4} iters  rr err {:>6}  hr err {:>6}",
            r.n_keep,
            r.median_ms,
            r.speedup,
            r.iterations,
            r.rr_error_rpm.map_or("-".into(), |x| format!("{x:.3}")),
            r.hr_error_bpm.map_or("-".into(), |x| format!("{x:.3}"))
        );
    }
    fs::write(args.out.join("bench.csv"), csv)?;
    Ok(true)
}

fn cmd_pattern(args: &PatternArgs) -> Result<bool> {
    let cfg = match &args.scenario {
        Some(p) => load(p)?.radar,
        None => RadarConfig::default(),
    };
    let lambda = cfg.wavelength();
    let tx = tx_weights(args.steer, cfg.tx_spacing_m, lambda, cfg.num_tx)?;
    let rx = rx_weights(args.steer, cfg.rx_spacing_m, lambda, cfg.num_rx)?;
    let angles = pattern_grid(args.step);
    let (name, gains) = match args.role {
        Role::Tx => ("tx", beam_pattern(&tx, &angles)),
        Role::Rx => ("rx", beam_pattern(&rx, &angles)),
        Role::Combined => ("combined", combined_pattern(&tx, &rx, &angles)),
    };
    fs::create_dir_all(&args.out)?;
    let path = args.out.join(format!("pattern_{name}.csv"));
    write_pattern_csv(&path, &angles, &gains)?;
    println!("wrote {}", path.display());
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Suite(a) => cmd_suite(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Pattern(a) => cmd_pattern(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
