//! Phase-shift beamforming for uniform linear arrays.
//!
//! Steering vectors use the receive phase convention `a_k(θ) = exp(j2π k d sinθ / λ)`.
//! A weight vector `w` has response `wᴴ a(θ)`, which peaks at the steering
//! angle for both the transmit and the receive array.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::RangeProfileCube;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamRole {
    Tx,
    Rx,
}

/// Unit-modulus phase-shift weights steering a ULA toward `steer_deg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamWeights {
    pub weights: Vec<Complex64>,
    pub role: BeamRole,
    pub steer_deg: f64,
    pub spacing_m: f64,
    pub wavelength_m: f64,
}

impl BeamWeights {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.weights
    }

    /// Array response `wᴴ a(θ)` on this array's own geometry.
    pub fn response(&self, angle_deg: f64) -> Complex64 {
        let a = steering_vector(self.len(), self.spacing_m, self.wavelength_m, angle_deg);
        self.weights.iter().zip(&a).map(|(w, x)| w.conj() * x).sum()
    }
}

/// ULA steering vector with element phases 2π k d sinθ / λ.
pub fn steering_vector(elements: usize, spacing_m: f64, wavelength_m: f64, angle_deg: f64) -> Vec<Complex64> {
    let step = 2.0 * PI * spacing_m * angle_deg.to_radians().sin() / wavelength_m;
    (0..elements)
        .map(|k| Complex64::from_polar(1.0, step * k as f64))
        .collect()
}

fn phase_weights(
    role: BeamRole,
    steer_deg: f64,
    spacing_m: f64,
    wavelength_m: f64,
    elements: usize,
) -> Result<BeamWeights> {
    if !(steer_deg.abs() <= 90.0) {
        return Err(Error::InvalidArgument(format!(
            "steering angle {steer_deg} outside [-90, 90]"
        )));
    }
    if elements == 0 {
        return Err(Error::InvalidArgument("array needs at least one element".into()));
    }
    Ok(BeamWeights {
        weights: steering_vector(elements, spacing_m, wavelength_m, steer_deg),
        role,
        steer_deg,
        spacing_m,
        wavelength_m,
    })
}

/// Transmit weights `w_i = exp(j2π i d sinθ / λ)`.
pub fn tx_weights(steer_deg: f64, spacing_m: f64, wavelength_m: f64, n_tx: usize) -> Result<BeamWeights> {
    phase_weights(BeamRole::Tx, steer_deg, spacing_m, wavelength_m, n_tx)
}

/// Receive combining weights, same law as [`tx_weights`] over the receive array.
pub fn rx_weights(steer_deg: f64, spacing_m: f64, wavelength_m: f64, n_rx: usize) -> Result<BeamWeights> {
    phase_weights(BeamRole::Rx, steer_deg, spacing_m, wavelength_m, n_rx)
}

/// `ȳ = wᴴ x`.
pub fn combine(signals: &[Complex64], weights: &[Complex64]) -> Result<Complex64> {
    if signals.len() != weights.len() {
        return Err(Error::LengthMismatch {
            expected: weights.len(),
            actual: signals.len(),
        });
    }
    Ok(weights.iter().zip(signals).map(|(w, x)| w.conj() * x).sum())
}

const PATTERN_FLOOR_DB: f64 = -300.0;

fn to_db(mags: &[f64]) -> Vec<f64> {
    let max = mags.iter().cloned().fold(0.0, f64::max);
    mags.iter()
        .map(|&m| {
            if max > 0.0 && m > 0.0 {
                (20.0 * (m / max).log10()).max(PATTERN_FLOOR_DB)
            } else {
                PATTERN_FLOOR_DB
            }
        })
        .collect()
}

/// Beam pattern `20 log10 |wᴴ a(θ)|` over `angles_deg`, normalized to 0 dB at its
/// maximum. Exact nulls are floored at -300 dB.
pub fn beam_pattern(w: &BeamWeights, angles_deg: &[f64]) -> Vec<f64> {
    let mags: Vec<f64> = angles_deg.iter().map(|&a| w.response(a).norm()).collect();
    to_db(&mags)
}

/// Two-way pattern of transmit and receive beamforming together: the product of
/// the two array responses, normalized to 0 dB.
pub fn combined_pattern(tx: &BeamWeights, rx: &BeamWeights, angles_deg: &[f64]) -> Vec<f64> {
    let mags: Vec<f64> = angles_deg
        .iter()
        .map(|&a| tx.response(a).norm() * rx.response(a).norm())
        .collect();
    to_db(&mags)
}

/// Pattern grid over [-90°, 90°] with the given step.
pub fn pattern_grid(step_deg: f64) -> Vec<f64> {
    let n = (180.0 / step_deg).round() as usize;
    (0..=n).map(|i| -90.0 + i as f64 * step_deg).collect()
}

/// Applies receive combining at one range bin for every slow-time chirp.
pub fn beamformed_target_signal(
    profiles: &RangeProfileCube,
    range_bin: usize,
    weights: &[Complex64],
) -> Result<Vec<Complex64>> {
    if range_bin >= profiles.range_bins() {
        return Err(Error::OutOfRange {
            index: range_bin,
            limit: profiles.range_bins(),
        });
    }
    (0..profiles.chirps())
        .map(|m| combine(&profiles.snapshot(range_bin, m), weights))
        .collect()
}

/// Writes `angle_deg,gain_db` rows.
pub fn write_pattern_csv(path: &Path, angles_deg: &[f64], gains_db: &[f64]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "angle_deg,gain_db")?;
    for (a, g) in angles_deg.iter().zip(gains_db) {
        writeln!(out, "{a},{g}")?;
    }
    out.flush()?;
    Ok(())
}
