use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aoa::AngleGrid;
use crate::config::RadarConfig;
use crate::error::{Error, Result};
use crate::frontend::Window;
use crate::scene::{CameraConfig, Scene};
use crate::vital::{Band, VmdParams};

/// Tunables of the sensing chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineParams {
    /// Range FFT length; `None` picks the next power of two of the sample count.
    pub n_fft: Option<usize>,
    pub window: Window,
    pub angle_grid: AngleGrid,
    pub mvdr_loading: f64,
    /// Frames of snapshots averaged into the localisation heatmap.
    pub heatmap_frames: usize,
    /// Stationarity thresholds as fractions of the image width.
    pub x_threshold_frac: f64,
    pub w_threshold_frac: f64,
    pub stationary_window_s: f64,
    /// Adjacent range bins per target (odd).
    pub channels: usize,
    /// Hankel window; `None` uses a third of the sequence length.
    pub ssa_window: Option<usize>,
    pub ssa_fraction: f64,
    pub k_min: usize,
    pub k_max: usize,
    pub vmd: VmdParams,
    /// Spectrum bins handed to the VMD; `None` keeps the whole spectrum.
    pub n_keep: Option<usize>,
    pub rr_band: Band,
    pub hr_band: Band,
    pub beamforming: bool,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            n_fft: None,
            window: Window::Hann,
            angle_grid: AngleGrid::default(),
            mvdr_loading: 1e-3,
            heatmap_frames: 20,
            x_threshold_frac: 0.02,
            w_threshold_frac: 0.02,
            stationary_window_s: 3.0,
            channels: 5,
            ssa_window: None,
            ssa_fraction: 0.70,
            k_min: 2,
            k_max: 8,
            vmd: VmdParams {
                alpha: 200.0,
                ..VmdParams::default()
            },
            n_keep: Some(100),
            rr_band: Band::respiration(),
            hr_band: Band::heart(),
            beamforming: true,
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        self.angle_grid.validate()?;
        self.vmd.validate()?;
        if !(self.mvdr_loading >= 0.0) {
            return bad("mvdr_loading must be non-negative");
        }
        if self.heatmap_frames == 0 {
            return bad("heatmap_frames must be positive");
        }
        if !(self.x_threshold_frac >= 0.0 && self.w_threshold_frac >= 0.0 && self.stationary_window_s > 0.0) {
            return bad("stationarity thresholds must be non-negative and the window positive");
        }
        if self.channels == 0 || self.channels % 2 == 0 {
            return bad("channels must be odd");
        }
        if !(self.ssa_fraction > 0.0 && self.ssa_fraction <= 1.0) || self.k_min == 0 || self.k_min > self.k_max {
            return bad("invalid mode-count policy");
        }
        if matches!(self.n_keep, Some(n) if n < 4) {
            return bad("n_keep must be at least 4");
        }
        for band in [self.rr_band, self.hr_band] {
            if !(band.low_hz >= 0.0 && band.low_hz < band.high_hz) {
                return bad("bands need 0 <= low < high");
            }
        }
        Ok(())
    }
}

fn default_repetitions() -> usize {
    1
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default)]
    pub radar: RadarConfig,
    pub scene: Scene,
    #[serde(default)]
    pub camera: CameraConfig,
    #[serde(default)]
    pub pipeline: PipelineParams,
    /// Per-sample SNR of the first target's echo at a single channel (dB).
    pub snr_db: f64,
    pub seed: u64,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
}

impl ScenarioSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.radar.validate()?;
        self.scene.validate(&self.radar)?;
        self.pipeline.validate()?;
        if !self.snr_db.is_finite() {
            return Err(Error::InvalidConfig("snr_db must be finite".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig("repetitions must be positive".into()));
        }
        let cam = &self.camera;
        if !(cam.image_width_px > 0.0 && cam.fps > 0.0 && cam.afov_deg > 0.0 && cam.afov_deg <= 90.0) {
            return Err(Error::InvalidConfig("invalid camera".into()));
        }
        if let Some(n) = self.pipeline.n_fft {
            if n < self.radar.samples_per_chirp {
                return Err(Error::InvalidConfig("n_fft below samples per chirp".into()));
            }
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}
