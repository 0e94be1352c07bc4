use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::vital::ModeSet;

const PEAK_FFT_LEN: usize = 1 << 16;

/// Closed frequency interval (Hz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Band {
    pub low_hz: f64,
    pub high_hz: f64,
}

impl Band {
    pub fn respiration() -> Self {
        Self {
            low_hz: 0.1,
            high_hz: 0.5,
        }
    }

    pub fn heart() -> Self {
        Self {
            low_hz: 0.8,
            high_hz: 2.5,
        }
    }

    pub fn contains(&self, f: f64) -> bool {
        f >= self.low_hz && f <= self.high_hz
    }
}

/// Respiration rate (RPM) and heart rate (BPM), absent when no mode falls in
/// the band.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VitalRates {
    pub rr_rpm: Option<f64>,
    pub hr_bpm: Option<f64>,
    pub rr_mode: Option<usize>,
    pub hr_mode: Option<usize>,
}

/// Frequency of the largest zero-padded FFT magnitude of `x` inside `band`.
pub fn peak_frequency(x: &[f64], sample_rate: f64, band: Band) -> Option<f64> {
    let n_fft = PEAK_FFT_LEN.max(x.len().next_power_of_two());
    let mut buf: Vec<Complex64> = x.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    buf.resize(n_fft, Complex64::new(0.0, 0.0));
    FftPlanner::<f64>::new().plan_fft_forward(n_fft).process(&mut buf);
    let df = sample_rate / n_fft as f64;
    let lo = (band.low_hz / df).ceil() as usize;
    let hi = ((band.high_hz / df).floor() as usize).min(n_fft / 2);
    (lo..=hi)
        .max_by(|&a, &b| buf[a].norm_sqr().total_cmp(&buf[b].norm_sqr()))
        .map(|b| b as f64 * df)
}

fn pick(modes: &ModeSet, band: Band) -> Option<(usize, f64)> {
    let row_energy = |k: usize| modes.modes.row(k).iter().map(|v| v * v).sum::<f64>();
    let k = (0..modes.k())
        .filter(|&k| band.contains(modes.center_freqs_hz[k]) && row_energy(k) > 0.0)
        .max_by(|&a, &b| row_energy(a).total_cmp(&row_energy(b)))?;
    let row = modes.modes.row(k).to_vec();
    peak_frequency(&row, modes.sample_rate, band).map(|f| (k, f))
}

/// For each band, the most energetic mode whose centre frequency lies in it
/// gives the rate through its spectral peak.
pub fn estimate_rates(modes: &ModeSet, rr_band: Band, hr_band: Band) -> VitalRates {
    let rr = pick(modes, rr_band);
    let hr = pick(modes, hr_band);
    VitalRates {
        rr_rpm: rr.map(|(_, f)| f * 60.0),
        hr_bpm: hr.map(|(_, f)| f * 60.0),
        rr_mode: rr.map(|(k, _)| k),
        hr_mode: hr.map(|(k, _)| k),
    }
}
