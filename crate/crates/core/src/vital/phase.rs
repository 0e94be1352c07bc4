use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::beamform::combine;
use crate::error::{Error, Result};
use crate::frontend::RangeProfileCube;

/// Unwrapped, mean-removed phase sequences `[channel l][sample t]` of `L`
/// adjacent range bins centred on `center_bin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseMatrix {
    pub data: Array2<f64>,
    pub sample_rate: f64,
    pub center_bin: usize,
}

impl PhaseMatrix {
    pub fn channels(&self) -> usize {
        self.data.nrows()
    }

    pub fn len(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// Removes 2π jumps so that successive samples differ by at most π.
pub fn unwrap_phase(phase: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phase.len());
    let mut offset = 0.0;
    for (i, &p) in phase.iter().enumerate() {
        if i > 0 {
            let d = p - phase[i - 1];
            offset -= 2.0 * PI * (d / (2.0 * PI)).round();
        }
        out.push(p + offset);
    }
    out
}

/// Rx-combines each of the `l` bins around `center_bin` at every frame, then
/// takes the argument, unwraps it and removes the per-channel mean.
pub fn extract_phase(
    profiles: &RangeProfileCube,
    combiner: &[Complex64],
    center_bin: usize,
    l: usize,
) -> Result<PhaseMatrix> {
    if l == 0 || l % 2 == 0 {
        return Err(Error::InvalidArgument(format!("channel count {l} must be odd")));
    }
    let half = l / 2;
    if center_bin < half || center_bin + half >= profiles.range_bins() {
        return Err(Error::OutOfRange {
            index: center_bin + half,
            limit: profiles.range_bins(),
        });
    }
    let frames: Vec<usize> = profiles.frame_chirps().collect();
    let mut data = Array2::zeros((l, frames.len()));
    for (row, bin) in (center_bin - half..=center_bin + half).enumerate() {
        let raw = frames
            .iter()
            .map(|&m| combine(&profiles.snapshot(bin, m), combiner).map(|z| z.arg()))
            .collect::<Result<Vec<f64>>>()?;
        let unwrapped = unwrap_phase(&raw);
        let mean = unwrapped.iter().sum::<f64>() / unwrapped.len().max(1) as f64;
        for (t, v) in unwrapped.iter().enumerate() {
            data[[row, t]] = v - mean;
        }
    }
    Ok(PhaseMatrix {
        data,
        sample_rate: profiles.config.frame_rate_hz,
        center_bin,
    })
}
