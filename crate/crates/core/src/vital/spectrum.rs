use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vital::PhaseMatrix;

/// One-sided (`ω ≥ 0`) spectra of the analytic signals of every channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSpectra {
    /// `[channel][bin]`; bin `b` sits at `b · sample_rate / full_len` Hz.
    pub bins: Vec<Vec<Complex64>>,
    /// Length of the time sequence the spectra came from.
    pub full_len: usize,
    pub sample_rate: f64,
}

impl AnalyticSpectra {
    pub fn channels(&self) -> usize {
        self.bins.len()
    }

    pub fn bin_count(&self) -> usize {
        self.bins.first().map_or(0, Vec::len)
    }

    pub fn bin_hz(&self, b: usize) -> f64 {
        b as f64 * self.sample_rate / self.full_len as f64
    }
}

/// Spectrum of the analytic signal of `s`: zero negative frequencies, double
/// positive ones, keep DC and Nyquist as they are.
pub fn analytic_full_spectrum(s: &[f64]) -> Vec<Complex64> {
    let n = s.len();
    let mut buf: Vec<Complex64> = s.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        let nyquist = n % 2 == 0 && k == n / 2;
        if k == 0 || nyquist {
            continue;
        }
        if k < n.div_ceil(2) {
            *z *= 2.0;
        } else {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    buf
}

/// Analytic-signal spectra of every channel, bins `0..=N/2`.
pub fn analytic_spectrum(s: &PhaseMatrix) -> Result<AnalyticSpectra> {
    let n = s.len();
    if n < 16 {
        return Err(Error::InvalidArgument(format!("need at least 16 samples, got {n}")));
    }
    let bins = (0..s.channels())
        .map(|l| {
            let row: Vec<f64> = s.data.row(l).to_vec();
            let mut full = analytic_full_spectrum(&row);
            full.truncate(n / 2 + 1);
            full
        })
        .collect();
    Ok(AnalyticSpectra {
        bins,
        full_len: n,
        sample_rate: s.sample_rate,
    })
}

/// Power spectral entropy in nats: `-Σ p ln p` with `p ∝ |X|²`.
pub fn pse(spectrum: &[Complex64]) -> Result<f64> {
    let n = spectrum.len() as f64;
    let power: Vec<f64> = spectrum.iter().map(|z| z.norm_sqr() / n).collect();
    let total: f64 = power.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroSignal);
    }
    Ok(power
        .iter()
        .map(|p| p / total)
        .filter(|p| *p > 0.0)
        .map(|p| -p * p.ln())
        .sum())
}

/// Keeps the first `n_keep` bins of every channel; `full_len` is preserved
/// so modes can be zero-padded back later.
pub fn truncate_spectrum(spectra: &AnalyticSpectra, n_keep: usize) -> Result<AnalyticSpectra> {
    if n_keep < 4 {
        return Err(Error::InvalidArgument(format!("n_keep {n_keep} below 4")));
    }
    if n_keep > spectra.bin_count() {
        return Err(Error::OutOfRange {
            index: n_keep,
            limit: spectra.bin_count(),
        });
    }
    Ok(AnalyticSpectra {
        bins: spectra.bins.iter().map(|b| b[..n_keep].to_vec()).collect(),
        full_len: spectra.full_len,
        sample_rate: spectra.sample_rate,
    })
}
