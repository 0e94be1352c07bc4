//! Scene description: static clutter, monitored people and moving interferers,
//! plus the synthetic camera detections that stand in for a person detector.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::config::RadarConfig;
use crate::error::{Error, Result};

/// One sinusoidal body-motion burst, active on `[start_s, stop_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyMotion {
    pub freq_hz: f64,
    pub amp_m: f64,
    pub start_s: f64,
    pub stop_s: f64,
}

impl BodyMotion {
    fn displacement(&self, t: f64) -> f64 {
        if t >= self.start_s && t < self.stop_s {
            self.amp_m * (2.0 * PI * self.freq_hz * t).sin()
        } else {
            0.0
        }
    }
}

fn motion_sum(motions: &[BodyMotion], t: f64) -> f64 {
    motions.iter().map(|m| m.displacement(t)).sum()
}

/// Chest micro-motion of a monitored person.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VitalParams {
    pub breath_freq_hz: f64,
    #[serde(default = "default_breath_amp")]
    pub breath_amp_m: f64,
    pub heart_freq_hz: f64,
    #[serde(default = "default_heart_amp")]
    pub heart_amp_m: f64,
    #[serde(default)]
    pub body_motion: Vec<BodyMotion>,
}

fn default_breath_amp() -> f64 {
    4e-3
}

fn default_heart_amp() -> f64 {
    3e-4
}

impl VitalParams {
    /// Breathing and heartbeat at the given rates with default amplitudes.
    pub fn from_rates(rr_rpm: f64, hr_bpm: f64) -> Self {
        Self {
            breath_freq_hz: rr_rpm / 60.0,
            breath_amp_m: default_breath_amp(),
            heart_freq_hz: hr_bpm / 60.0,
            heart_amp_m: default_heart_amp(),
            body_motion: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.breath_freq_hz > 0.0 && self.breath_freq_hz < self.heart_freq_hz) {
            return Err(Error::InvalidScene(
                "vital frequencies must satisfy 0 < breath < heart".into(),
            ));
        }
        if !(self.heart_amp_m < self.breath_amp_m) || self.heart_amp_m < 0.0 {
            return Err(Error::InvalidScene(
                "heart displacement must be smaller than breathing displacement".into(),
            ));
        }
        for m in &self.body_motion {
            if !(m.stop_s >= m.start_s && m.freq_hz >= 0.0) {
                return Err(Error::InvalidScene("malformed body-motion burst".into()));
            }
        }
        Ok(())
    }
}

/// Chest displacement ΔR(t): breathing, heartbeat and any active body-motion bursts.
pub fn chest_displacement(t: f64, vitals: &VitalParams) -> f64 {
    vitals.breath_amp_m * (2.0 * PI * vitals.breath_freq_hz * t).sin()
        + vitals.heart_amp_m * (2.0 * PI * vitals.heart_freq_hz * t).sin()
        + motion_sum(&vitals.body_motion, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticReflector {
    pub range_m: f64,
    pub angle_deg: f64,
    pub amplitude: f64,
}

/// A person who stays in place and whose vital signs are to be measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub range_m: f64,
    pub angle_deg: f64,
    pub amplitude: f64,
    pub vitals: VitalParams,
}

/// Trajectory knot of a moving person. Position and amplitude are linearly
/// interpolated between knots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Waypoint {
    pub t_s: f64,
    pub range_m: f64,
    pub angle_deg: f64,
    pub amplitude: f64,
}

/// Instantaneous state of a mover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoverState {
    pub range_m: f64,
    pub angle_deg: f64,
    pub amplitude: f64,
    pub body_shift_m: f64,
}

/// A person walking through the scene. Outside the time span of its waypoints
/// the mover is absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mover {
    pub waypoints: Vec<Waypoint>,
    #[serde(default)]
    pub body_motion: Vec<BodyMotion>,
}

impl Mover {
    pub fn state_at(&self, t: f64) -> Option<MoverState> {
        let first = self.waypoints.first()?;
        let last = self.waypoints.last()?;
        if t < first.t_s || t > last.t_s {
            return None;
        }
        let idx = self.waypoints.windows(2).position(|w| t <= w[1].t_s).unwrap_or(0);
        let (a, b) = if self.waypoints.len() == 1 {
            (first, first)
        } else {
            (&self.waypoints[idx], &self.waypoints[idx + 1])
        };
        let span = b.t_s - a.t_s;
        let f = if span > 0.0 { (t - a.t_s) / span } else { 0.0 };
        let lerp = |x: f64, y: f64| x + (y - x) * f;
        Some(MoverState {
            range_m: lerp(a.range_m, b.range_m),
            angle_deg: lerp(a.angle_deg, b.angle_deg),
            amplitude: lerp(a.amplitude, b.amplitude),
            body_shift_m: motion_sum(&self.body_motion, t),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub duration_s: f64,
    #[serde(default)]
    pub statics: Vec<StaticReflector>,
    #[serde(default)]
    pub targets: Vec<Target>,
    #[serde(default)]
    pub movers: Vec<Mover>,
}

impl Scene {
    /// Checks ranges and angles of every object against the radar.
    pub fn validate(&self, cfg: &RadarConfig) -> Result<()> {
        if !(self.duration_s > 0.0) {
            return Err(Error::InvalidScene("duration must be positive".into()));
        }
        let max_range = cfg.max_unambiguous_range();
        let check = |range: f64, angle: f64| -> Result<()> {
            if !(range > 0.0 && range < max_range) {
                return Err(Error::InvalidScene(format!(
                    "range {range} m outside (0, {max_range:.3}) m"
                )));
            }
            if !(-90.0..=90.0).contains(&angle) {
                return Err(Error::InvalidScene(format!("angle {angle} deg outside [-90, 90]")));
            }
            Ok(())
        };
        for s in &self.statics {
            check(s.range_m, s.angle_deg)?;
        }
        for t in &self.targets {
            check(t.range_m, t.angle_deg)?;
            t.vitals.validate()?;
        }
        for m in &self.movers {
            if m.waypoints.is_empty() {
                return Err(Error::InvalidScene("mover without waypoints".into()));
            }
            if m.waypoints.windows(2).any(|w| w[1].t_s < w[0].t_s) {
                return Err(Error::InvalidScene("mover waypoints must be time-ordered".into()));
            }
            for w in &m.waypoints {
                check(w.range_m, w.angle_deg)?;
            }
        }
        Ok(())
    }

    /// Multiplies every reflector amplitude by `factor`.
    pub fn scaled(&self, factor: f64) -> Scene {
        let mut s = self.clone();
        s.statics.iter_mut().for_each(|o| o.amplitude *= factor);
        s.targets.iter_mut().for_each(|o| o.amplitude *= factor);
        for m in &mut s.movers {
            m.waypoints.iter_mut().for_each(|w| w.amplitude *= factor);
        }
        s
    }
}

/// Camera stand-in: a pinhole whose horizontal pixel axis maps linearly onto
/// azimuth over the angular field of view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraConfig {
    pub image_width_px: f64,
    pub image_height_px: f64,
    pub fps: f64,
    /// Half field of view; boxes cover azimuths in [-afov, +afov].
    pub afov_deg: f64,
    /// Standard deviation of the Gaussian jitter added to box x and width.
    pub jitter_px: f64,
    /// Physical width of a person, used to size the boxes.
    pub person_width_m: f64,
}

impl Default for CameraConfig {
    fn default() -> Self {
        Self {
            image_width_px: 1920.0,
            image_height_px: 1080.0,
            fps: 10.0,
            afov_deg: 60.0,
            jitter_px: 2.0,
            person_width_m: 0.5,
        }
    }
}

impl CameraConfig {
    /// Pixel column of azimuth `angle_deg`.
    pub fn angle_to_px(&self, angle_deg: f64) -> f64 {
        (angle_deg + self.afov_deg) / (2.0 * self.afov_deg) * self.image_width_px
    }

    /// Inverse of [`CameraConfig::angle_to_px`].
    pub fn px_to_angle(&self, px: f64) -> f64 {
        px / self.image_width_px * 2.0 * self.afov_deg - self.afov_deg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub true_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionFrame {
    pub timestamp: f64,
    pub boxes: Vec<DetectionBox>,
    pub image_width: f64,
}

/// Ground-truth label of the i-th monitored target.
pub fn target_id(i: usize) -> String {
    format!("target-{i}")
}

/// Ground-truth label of the j-th mover.
pub fn mover_id(j: usize) -> String {
    format!("mover-{j}")
}

/// Produces person boxes for every camera frame over the scene duration.
///
/// Objects outside the camera field of view get no box. Boxes are clipped to
/// the image.
pub fn synthesize_detections(scene: &Scene, cam: &CameraConfig, seed: u64) -> Vec<DetectionFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, cam.jitter_px.max(0.0)).expect("finite jitter");
    let frames = (scene.duration_s * cam.fps).floor() as usize;
    let px_per_deg = cam.image_width_px / (2.0 * cam.afov_deg);

    let mut out = Vec::with_capacity(frames);
    for f in 0..frames {
        let t = f as f64 / cam.fps;
        let mut boxes = Vec::new();
        let mut push = |angle: f64, range: f64, id: String, rng: &mut ChaCha8Rng| {
            if angle.abs() > cam.afov_deg {
                return;
            }
            let width_deg = 2.0 * (0.5 * cam.person_width_m / range).atan().to_degrees();
            let w = (width_deg * px_per_deg + jitter.sample(rng)).max(1.0);
            let cx = cam.angle_to_px(angle) + jitter.sample(rng);
            let x0 = (cx - w / 2.0).clamp(0.0, cam.image_width_px - 1.0);
            let x1 = (cx + w / 2.0).clamp(x0 + 1.0, cam.image_width_px);
            let h = (w * 2.5).min(cam.image_height_px);
            let y = ((cam.image_height_px - h) / 2.0).max(0.0);
            boxes.push(DetectionBox {
                x: x0,
                y,
                w: x1 - x0,
                h,
                true_id: id,
            });
        };
        for (i, tgt) in scene.targets.iter().enumerate() {
            push(tgt.angle_deg, tgt.range_m, target_id(i), &mut rng);
        }
        for (j, mv) in scene.movers.iter().enumerate() {
            if let Some(st) = mv.state_at(t) {
                push(st.angle_deg, st.range_m, mover_id(j), &mut rng);
            }
        }
        out.push(DetectionFrame {
            timestamp: t,
            boxes,
            image_width: cam.image_width_px,
        });
    }
    out
}
