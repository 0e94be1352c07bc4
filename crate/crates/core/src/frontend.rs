//! Fast-time range FFT.

use std::f64::consts::PI;

use ndarray::Array3;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::config::RadarConfig;
use crate::error::{Error, Result};
use crate::sim::RadarCube;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    #[default]
    None,
    Hann,
}

impl Window {
    fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            Window::None => vec![1.0; len],
            Window::Hann => (0..len)
                .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos())
                .collect(),
        }
    }
}

/// Complex range profiles indexed `[range bin r][slow m][channel k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfileCube {
    pub data: Array3<Complex64>,
    /// Range of each bin (m).
    pub range_axis: Vec<f64>,
    pub n_fft: usize,
    pub config: RadarConfig,
    pub frame_timestamps: Vec<f64>,
}

impl RangeProfileCube {
    pub fn range_bins(&self) -> usize {
        self.data.dim().0
    }

    pub fn chirps(&self) -> usize {
        self.data.dim().1
    }

    pub fn channels(&self) -> usize {
        self.data.dim().2
    }

    /// Width of one range bin (m).
    pub fn bin_width(&self) -> f64 {
        range_bin_width(&self.config, self.n_fft)
    }

    /// Slow-time indices of the first chirp of every frame; this is the
    /// sequence the vital-sign stage samples at the frame rate.
    pub fn frame_chirps(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.chirps()).step_by(self.config.chirps_per_frame)
    }

    /// Snapshot `x_m` across channels at bin `r`.
    pub fn snapshot(&self, r: usize, m: usize) -> Vec<Complex64> {
        (0..self.channels()).map(|k| self.data[[r, m, k]]).collect()
    }
}

/// Smallest power of two that holds `samples`.
pub fn default_n_fft(samples: usize) -> usize {
    samples.next_power_of_two()
}

/// Range spanned by one FFT bin: 1 / (α T_f n_fft). Equals c/(2B)·(N/n_fft)
/// when the ADC window covers the whole chirp.
pub fn range_bin_width(cfg: &RadarConfig, n_fft: usize) -> f64 {
    1.0 / (cfg.chirp_slope_factor() * cfg.adc_interval_s * n_fft as f64)
}

/// FFT bin of a reflector at `range_m`: round(α R T_f n_fft).
pub fn range_bin_of(range_m: f64, cfg: &RadarConfig, n_fft: usize) -> Result<usize> {
    if !(range_m >= 0.0 && range_m < cfg.max_unambiguous_range()) {
        return Err(Error::RangeOutOfBounds(range_m));
    }
    Ok((cfg.beat_frequency(range_m) * cfg.adc_interval_s * n_fft as f64).round() as usize)
}

/// DFT along fast time for every (chirp, channel); keeps the `n_fft / 2`
/// non-negative-frequency bins as complex values.
pub fn range_fft(cube: &RadarCube, n_fft: usize, window: Window) -> Result<RangeProfileCube> {
    let (n_fast, n_slow, n_chan) = cube.data.dim();
    if n_fft < n_fast {
        return Err(Error::InvalidArgument(format!(
            "n_fft {n_fft} smaller than samples per chirp {n_fast}"
        )));
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_fft);
    let coeffs = window.coefficients(n_fast);
    let n_bins = n_fft / 2;
    let mut data = Array3::zeros((n_bins, n_slow, n_chan));
    let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
    for m in 0..n_slow {
        for k in 0..n_chan {
            buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            for n in 0..n_fast {
                buf[n] = cube.data[[n, m, k]] * coeffs[n];
            }
            fft.process(&mut buf);
            for r in 0..n_bins {
                data[[r, m, k]] = buf[r];
            }
        }
    }
    let width = range_bin_width(&cube.config, n_fft);
    Ok(RangeProfileCube {
        data,
        range_axis: (0..n_bins).map(|r| r as f64 * width).collect(),
        n_fft,
        config: cube.config.clone(),
        frame_timestamps: cube.frame_timestamps.clone(),
    })
}
