use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{sub_seed, ScenarioSpec};
use crate::aoa::{range_angle_heatmap, Heatmap};
use crate::beamform::{rx_weights, tx_weights};
use crate::error::{Error, Result};
use crate::frontend::{default_n_fft, range_bin_of, range_fft, RangeProfileCube};
use crate::fusion::{filter_stationary, localize, pixel_to_angle_window, TargetLocation, TrackStore};
use crate::scene::{synthesize_detections, target_id, DetectionFrame};
use crate::sim::{synthesize_cube, RadarCube};
use crate::vital::{
    adaptive_weights, analytic_spectrum, estimate_rates, extract_phase, select_mode_count, truncate_spectrum, wmc_vmd,
    ModeSet, PhaseMatrix,
};

const NOISE_STREAM: u64 = 1;
const CAMERA_STREAM: u64 = 2;
const BF_NOISE_STREAM: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Simulate,
    RangeFft,
    Heatmap,
    Fusion,
    Beamform,
    Phase,
    Weights,
    ModeCount,
    Spectrum,
    Vmd,
    Rates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: Stage,
    pub ms: f64,
}

/// Result of one monitored person.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetReport {
    pub id: String,
    pub true_rr_rpm: f64,
    pub true_hr_bpm: f64,
    pub est_rr_rpm: Option<f64>,
    pub est_hr_bpm: Option<f64>,
    pub rr_error_rpm: Option<f64>,
    pub hr_error_bpm: Option<f64>,
    pub location: TargetLocation,
    pub true_range_bin: usize,
    pub true_angle_bin: Option<usize>,
    pub range_bin_error: usize,
    pub angle_bin_error: Option<usize>,
    pub mode_count: usize,
    pub center_freqs_hz: Vec<f64>,
    pub channel_weights: Vec<f64>,
    pub vmd_iterations: usize,
    pub vmd_converged: bool,
}

/// Deterministic run summary; wall-clock timings live in [`RunOutput::timings`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub seed: u64,
    pub beamforming: bool,
    pub ok: bool,
    pub failed_stage: Option<Stage>,
    pub error: Option<String>,
    pub targets: Vec<TargetReport>,
    pub config: ScenarioSpec,
}

/// Optional intermediate products kept for dumping.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub cube: Option<RadarCube>,
    pub heatmap: Option<Heatmap>,
    pub detections: Vec<DetectionFrame>,
    pub modes: Vec<ModeSet>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub timings: Vec<StageTiming>,
    pub total_ms: f64,
    pub artifacts: Artifacts,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub keep_cube: bool,
    /// Replaces the synthetic camera with a recorded detection stream.
    pub detections: Option<Vec<DetectionFrame>>,
}

struct Timer {
    timings: Vec<StageTiming>,
}

impl Timer {
    fn stage<T>(&mut self, stage: Stage, f: impl FnOnce() -> Result<T>) -> std::result::Result<T, (Stage, Error)> {
        let start = Instant::now();
        let out = f();
        self.timings.push(StageTiming {
            stage,
            ms: start.elapsed().as_secs_f64() * 1e3,
        });
        out.map_err(|e| (stage, e))
    }
}

pub fn run_scenario(spec: &ScenarioSpec) -> RunOutput {
    run_scenario_with(spec, &RunOptions::default())
}

/// Runs the full chain on `spec`. A failing stage ends the run and is
/// labelled in the report rather than returned as an error.
pub fn run_scenario_with(spec: &ScenarioSpec, opts: &RunOptions) -> RunOutput {
    let start = Instant::now();
    let mut timer = Timer { timings: Vec::new() };
    let mut artifacts = Artifacts::default();
    let mut targets = Vec::new();
    let outcome = execute(spec, opts, &mut timer, &mut artifacts, &mut targets);
    let (failed_stage, error) = match outcome {
        Ok(()) => (None, None),
        Err((stage, e)) => (Some(stage), Some(e.to_string())),
    };
    RunOutput {
        report: RunReport {
            scenario: spec.name.clone(),
            seed: spec.seed,
            beamforming: spec.pipeline.beamforming,
            ok: failed_stage.is_none(),
            failed_stage,
            error,
            targets,
            config: spec.clone(),
        },
        timings: timer.timings,
        total_ms: start.elapsed().as_secs_f64() * 1e3,
        artifacts,
    }
}

fn reference_power(spec: &ScenarioSpec) -> f64 {
    spec.scene.targets.first().map_or(1.0, |t| t.amplitude * t.amplitude)
}

fn simulate(spec: &ScenarioSpec, tx: Option<&[Complex64]>, stream: u64) -> Result<RadarCube> {
    let mut cube = synthesize_cube(&spec.scene, &spec.radar, tx)?;
    cube.add_noise(spec.snr_db, reference_power(spec), sub_seed(spec.seed, stream));
    Ok(cube)
}

fn execute(
    spec: &ScenarioSpec,
    opts: &RunOptions,
    timer: &mut Timer,
    artifacts: &mut Artifacts,
    reports: &mut Vec<TargetReport>,
) -> std::result::Result<(), (Stage, Error)> {
    let p = &spec.pipeline;
    let cfg = &spec.radar;
    timer.stage(Stage::Config, || spec.validate())?;
    let n_fft = p.n_fft.unwrap_or_else(|| default_n_fft(cfg.samples_per_chirp));

    let cube = timer.stage(Stage::Simulate, || simulate(spec, None, NOISE_STREAM))?;
    let profiles = timer.stage(Stage::RangeFft, || range_fft(&cube, n_fft, p.window))?;
    if opts.keep_cube {
        artifacts.cube = Some(cube);
    } else {
        drop(cube);
    }
    let heatmap = timer.stage(Stage::Heatmap, || {
        let count = (p.heatmap_frames * cfg.chirps_per_frame).min(profiles.chirps());
        range_angle_heatmap(&profiles, &p.angle_grid, p.mvdr_loading, 0, count)
    })?;

    let locations = timer.stage(Stage::Fusion, || {
        let detections = match &opts.detections {
            Some(d) => d.clone(),
            None => synthesize_detections(&spec.scene, &spec.camera, sub_seed(spec.seed, CAMERA_STREAM)),
        };
        let store = TrackStore::from_frames(&detections)?;
        let width = spec.camera.image_width_px;
        let stationary = filter_stationary(
            &store.tracks(),
            p.x_threshold_frac * width,
            p.w_threshold_frac * width,
            p.stationary_window_s,
        );
        let locs = (0..spec.scene.targets.len())
            .map(|i| {
                let id = target_id(i);
                let track = stationary
                    .iter()
                    .find(|t| t.id == id)
                    .ok_or_else(|| Error::InvalidScene(format!("{id} has no stationary detection track")))?;
                let (x, w) = track.mean_extent(p.stationary_window_s).ok_or(Error::EmptyWindow)?;
                let x0 = x.clamp(0.0, width);
                let window = pixel_to_angle_window(x0, w.min(width - x0), width, heatmap.angle_bins())?;
                let mut loc = localize(&heatmap, window)?;
                loc.source_id = Some(id);
                Ok(loc)
            })
            .collect::<Result<Vec<_>>>()?;
        artifacts.detections = detections;
        Ok(locs)
    })?;
    artifacts.heatmap = Some(heatmap);

    for (i, loc) in locations.into_iter().enumerate() {
        let target = &spec.scene.targets[i];
        let (steered, combiner) = timer.stage(Stage::Beamform, || {
            if p.beamforming {
                let lambda = cfg.wavelength();
                let tx = tx_weights(loc.angle_deg, cfg.tx_spacing_m, lambda, cfg.num_tx)?;
                let rx = rx_weights(loc.angle_deg, cfg.rx_spacing_m, lambda, cfg.num_rx)?;
                let cube = simulate(spec, Some(tx.as_slice()), BF_NOISE_STREAM)?;
                Ok((Some(range_fft(&cube, n_fft, p.window)?), rx.weights))
            } else {
                let mut single = vec![Complex64::new(0.0, 0.0); cfg.num_rx];
                single[0] = Complex64::new(1.0, 0.0);
                Ok((None, single))
            }
        })?;
        let source: &RangeProfileCube = steered.as_ref().unwrap_or(&profiles);
        let phase = timer.stage(Stage::Phase, || {
            extract_phase(source, &combiner, loc.range_bin, p.channels)
        })?;
        drop(steered);

        let (modes, weights, k) = decompose(&phase, p, timer)?;
        let rates = timer.stage(Stage::Rates, || Ok(estimate_rates(&modes, p.rr_band, p.hr_band)))?;

        let true_rr = target.vitals.breath_freq_hz * 60.0;
        let true_hr = target.vitals.heart_freq_hz * 60.0;
        let true_range_bin = range_bin_of(target.range_m, cfg, n_fft).map_err(|e| (Stage::Rates, e))?;
        let true_angle_bin = p.angle_grid.bin_of(target.angle_deg);
        reports.push(TargetReport {
            id: target_id(i),
            true_rr_rpm: true_rr,
            true_hr_bpm: true_hr,
            est_rr_rpm: rates.rr_rpm,
            est_hr_bpm: rates.hr_bpm,
            rr_error_rpm: rates.rr_rpm.map(|r| (r - true_rr).abs()),
            hr_error_bpm: rates.hr_bpm.map(|h| (h - true_hr).abs()),
            range_bin_error: loc.range_bin.abs_diff(true_range_bin),
            angle_bin_error: true_angle_bin.map(|b| loc.angle_bin.abs_diff(b)),
            location: loc,
            true_range_bin,
            true_angle_bin,
            mode_count: k,
            center_freqs_hz: modes.center_freqs_hz.clone(),
            channel_weights: weights,
            vmd_iterations: modes.iterations,
            vmd_converged: modes.converged,
        });
        artifacts.modes.push(modes);
    }
    Ok(())
}

type StageResult<T> = std::result::Result<T, (Stage, Error)>;

fn decompose(
    phase: &PhaseMatrix,
    p: &super::PipelineParams,
    timer: &mut Timer,
) -> StageResult<(ModeSet, Vec<f64>, usize)> {
    let weights = timer.stage(Stage::Weights, || adaptive_weights(phase))?;
    let k = timer.stage(Stage::ModeCount, || {
        let combined = weights.combine(phase)?;
        let window = p.ssa_window.unwrap_or(combined.len() / 3);
        select_mode_count(&combined, window, p.ssa_fraction, p.k_min, p.k_max)
    })?;
    let spectra = timer.stage(Stage::Spectrum, || {
        let full = analytic_spectrum(phase)?;
        match p.n_keep {
            Some(n) => truncate_spectrum(&full, n.min(full.bin_count())),
            None => Ok(full),
        }
    })?;
    let modes = timer.stage(Stage::Vmd, || wmc_vmd(&spectra, &weights, k, &p.vmd))?;
    Ok((modes, weights.w, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::PipelineParams;
    use crate::scene::{Scene, Target, VitalParams};

    fn spec() -> ScenarioSpec {
        ScenarioSpec {
            name: "unit".into(),
            radar: Default::default(),
            scene: Scene {
                duration_s: 30.0,
                targets: vec![Target {
                    range_m: 2.0,
                    angle_deg: 30.0,
                    amplitude: 1.0,
                    vitals: VitalParams::from_rates(15.0, 72.0),
                }],
                ..Scene::default()
            },
            camera: Default::default(),
            pipeline: PipelineParams::default(),
            snr_db: 20.0,
            seed: 7,
            repetitions: 1,
        }
    }

    #[test]
    fn clean_run_meets_bounds() {
        let out = run_scenario(&spec());
        assert!(out.report.ok, "{:?}", out.report.error);
        let t = &out.report.targets[0];
        assert!(t.rr_error_rpm.unwrap() <= 0.5, "{t:?}");
        assert!(t.hr_error_bpm.unwrap() <= 6.0, "{t:?}");
        assert!(t.range_bin_error <= 1 && t.angle_bin_error.unwrap() <= 1, "{t:?}");
        let stage_sum: f64 = out.timings.iter().map(|s| s.ms).sum();
        assert!(stage_sum <= out.total_ms);
    }

    #[test]
    fn failure_is_labelled() {
        let mut s = spec();
        s.pipeline.channels = 4;
        let out = run_scenario(&s);
        assert!(!out.report.ok);
        assert_eq!(out.report.failed_stage, Some(Stage::Config));
    }

    #[test]
    fn missing_detection_track_fails_fusion() {
        let out = run_scenario_with(
            &spec(),
            &RunOptions {
                detections: Some(vec![]),
                ..RunOptions::default()
            },
        );
        assert_eq!(out.report.failed_stage, Some(Stage::Fusion));
    }
}
