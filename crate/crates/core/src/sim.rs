//! Synthetic FMCW radar cubes.
//!
//! Every reflector contributes `A · g_tx(θ) · exp(j2π(α R n T_f + 2(R + ΔR)/λ + k d_r sinθ / λ))`
//! to fast-time sample `n`, slow-time chirp `m` and receive channel `k`. Slow-time
//! quantities (ΔR, mover position and amplitude) are evaluated at the chirp start
//! and held for the chirp (stop-and-hop).

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array3;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RadarConfig;
use crate::error::{Error, Result};
use crate::scene::{chest_displacement, Scene};

/// Raw baseband samples indexed `[fast n][slow m][channel k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadarCube {
    pub data: Array3<Complex64>,
    pub config: RadarConfig,
    /// Start time of every slow-time chirp (s).
    pub frame_timestamps: Vec<f64>,
}

impl RadarCube {
    pub fn samples(&self) -> usize {
        self.data.dim().0
    }

    pub fn chirps(&self) -> usize {
        self.data.dim().1
    }

    pub fn channels(&self) -> usize {
        self.data.dim().2
    }

    /// An all-zero cube with the dimensions implied by `cfg` and `duration_s`.
    pub fn zeros(cfg: &RadarConfig, duration_s: f64) -> Self {
        let chirps = cfg.frames_for(duration_s) * cfg.chirps_per_frame;
        Self {
            data: Array3::zeros((cfg.samples_per_chirp, chirps, cfg.num_rx)),
            config: cfg.clone(),
            frame_timestamps: (0..chirps).map(|m| cfg.chirp_start(m)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Adds circular complex white noise with power `reference_power / 10^(snr_db/10)`
    /// per sample. Noise is drawn sequentially in memory order, so the result is a
    /// pure function of the seed.
    pub fn add_noise(&mut self, snr_db: f64, reference_power: f64, seed: u64) {
        let power = reference_power / 10f64.powf(snr_db / 10.0);
        if !(power > 0.0) {
            return;
        }
        let normal = Normal::new(0.0, (power / 2.0).sqrt()).expect("finite noise power");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for z in self.data.iter_mut() {
            z.re += normal.sample(&mut rng);
            z.im += normal.sample(&mut rng);
        }
    }

    /// Writes the samples as little-endian interleaved `f32` (re, im) pairs in
    /// `[fast][slow][channel]` order, with a JSON sidecar at `<path>.json`.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        for z in self.data.iter() {
            out.write_all(&(z.re as f32).to_le_bytes())?;
            out.write_all(&(z.im as f32).to_le_bytes())?;
        }
        out.flush()?;
        let (n, m, k) = self.data.dim();
        let sidecar = CubeSidecar {
            format: "cf32le".into(),
            order: ["fast_time".into(), "slow_time".into(), "channel".into()],
            shape: [n, m, k],
            config: self.config.clone(),
            frame_timestamps: self.frame_timestamps.clone(),
        };
        let file = File::create(sidecar_path(path))?;
        serde_json::to_writer_pretty(file, &sidecar)?;
        Ok(())
    }

    /// Reads a cube written by [`RadarCube::write_binary`] (at `f32` precision).
    pub fn read_binary(path: &Path) -> Result<Self> {
        let sidecar: CubeSidecar = serde_json::from_reader(File::open(sidecar_path(path))?)?;
        let [n, m, k] = sidecar.shape;
        let mut bytes = Vec::new();
        File::open(path)?.read_to_end(&mut bytes)?;
        if bytes.len() != n * m * k * 8 {
            return Err(Error::LengthMismatch {
                expected: n * m * k * 8,
                actual: bytes.len(),
            });
        }
        let values: Vec<Complex64> = bytes
            .chunks_exact(8)
            .map(|c| {
                let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
                let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
                Complex64::new(re as f64, im as f64)
            })
            .collect();
        let data = Array3::from_shape_vec((n, m, k), values).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(Self {
            data,
            config: sidecar.config,
            frame_timestamps: sidecar.frame_timestamps,
        })
    }
}

/// JSON description written next to a binary cube dump.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CubeSidecar {
    pub format: String,
    pub order: [String; 3],
    pub shape: [usize; 3],
    pub config: RadarConfig,
    pub frame_timestamps: Vec<f64>,
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".json");
    p.into()
}

/// Illumination gain `wᴴ a_tx(θ)` of the transmit array. Without weights a
/// single element transmits with unit gain.
pub fn tx_gain(cfg: &RadarConfig, tx_weights: Option<&[Complex64]>, angle_deg: f64) -> Complex64 {
    match tx_weights {
        None => Complex64::new(1.0, 0.0),
        Some(w) => {
            let step = 2.0 * PI * cfg.tx_spacing_m * angle_deg.to_radians().sin() / cfg.wavelength();
            w.iter()
                .enumerate()
                .map(|(i, wi)| wi.conj() * Complex64::from_polar(1.0, step * i as f64))
                .sum()
        }
    }
}

#[derive(Clone, Copy)]
struct Reflector {
    amplitude: Complex64,
    range_m: f64,
    shift_m: f64,
    angle_deg: f64,
}

fn check_beat(cfg: &RadarConfig, range_m: f64) -> Result<()> {
    let beat = cfg.beat_frequency(range_m).abs();
    if beat > cfg.nyquist_hz() {
        return Err(Error::BeatAboveNyquist {
            range_m,
            beat_hz: beat,
            nyquist_hz: cfg.nyquist_hz(),
        });
    }
    Ok(())
}

/// Generates the noiseless radar cube of `scene`.
///
/// With `tx_weights` every transmit element radiates simultaneously and each
/// reflector is scaled by the array's illumination gain toward it; without,
/// a single element transmits. Both cases share this code path.
pub fn synthesize_cube(scene: &Scene, cfg: &RadarConfig, tx_weights: Option<&[Complex64]>) -> Result<RadarCube> {
    cfg.validate()?;
    for s in &scene.statics {
        check_beat(cfg, s.range_m)?;
    }
    for t in &scene.targets {
        check_beat(cfg, t.range_m)?;
    }
    for w in scene.movers.iter().flat_map(|m| &m.waypoints) {
        check_beat(cfg, w.range_m)?;
    }
    scene.validate(cfg)?;
    if let Some(w) = tx_weights {
        if w.len() != cfg.num_tx {
            return Err(Error::LengthMismatch {
                expected: cfg.num_tx,
                actual: w.len(),
            });
        }
    }

    let mut cube = RadarCube::zeros(cfg, scene.duration_s);
    let (n_fast, n_slow, n_chan) = cube.data.dim();
    let lambda = cfg.wavelength();
    let fast_step = 2.0 * PI * cfg.chirp_slope_factor() * cfg.adc_interval_s;

    // Fast-time phasors of objects whose nominal range never changes.
    let fixed: Vec<(Reflector, Vec<Complex64>, Option<usize>)> = scene
        .statics
        .iter()
        .map(|s| (s.range_m, s.angle_deg, Complex64::new(s.amplitude, 0.0), None))
        .chain(
            scene
                .targets
                .iter()
                .enumerate()
                .map(|(i, t)| (t.range_m, t.angle_deg, Complex64::new(t.amplitude, 0.0), Some(i))),
        )
        .map(|(range, angle, amp, target)| {
            let table = (0..n_fast)
                .map(|n| Complex64::from_polar(1.0, fast_step * range * n as f64))
                .collect();
            let refl = Reflector {
                amplitude: amp * tx_gain(cfg, tx_weights, angle),
                range_m: range,
                shift_m: 0.0,
                angle_deg: angle,
            };
            (refl, table, target)
        })
        .collect();

    let slices: Vec<Vec<Complex64>> = cube
        .frame_timestamps
        .par_iter()
        .map(|&t| {
            let mut slice = vec![Complex64::new(0.0, 0.0); n_fast * n_chan];
            let mut accumulate = |refl: &Reflector, table: Option<&[Complex64]>| {
                let base = 2.0 * PI * 2.0 * (refl.range_m + refl.shift_m) / lambda;
                let chan_step = 2.0 * PI * cfg.rx_spacing_m * refl.angle_deg.to_radians().sin() / lambda;
                let chan: Vec<Complex64> = (0..n_chan)
                    .map(|k| refl.amplitude * Complex64::from_polar(1.0, base + chan_step * k as f64))
                    .collect();
                for n in 0..n_fast {
                    let fast = match table {
                        Some(tab) => tab[n],
                        None => Complex64::from_polar(1.0, fast_step * refl.range_m * n as f64),
                    };
                    let row = &mut slice[n * n_chan..(n + 1) * n_chan];
                    for (out, c) in row.iter_mut().zip(&chan) {
                        *out += fast * c;
                    }
                }
            };
            for (refl, table, target) in &fixed {
                let shift = target.map_or(0.0, |i| chest_displacement(t, &scene.targets[i].vitals));
                let r = Reflector {
                    shift_m: shift,
                    ..*refl
                };
                accumulate(&r, Some(table));
            }
            for mover in &scene.movers {
                if let Some(st) = mover.state_at(t) {
                    let r = Reflector {
                        amplitude: Complex64::new(st.amplitude, 0.0) * tx_gain(cfg, tx_weights, st.angle_deg),
                        range_m: st.range_m,
                        shift_m: st.body_shift_m,
                        angle_deg: st.angle_deg,
                    };
                    accumulate(&r, None);
                }
            }
            slice
        })
        .collect();

    for (m, slice) in slices.into_iter().enumerate() {
        for n in 0..n_fast {
            for k in 0..n_chan {
                cube.data[[n, m, k]] = slice[n * n_chan + k];
            }
        }
    }
    debug_assert_eq!(cube.chirps(), n_slow);
    Ok(cube)
}
