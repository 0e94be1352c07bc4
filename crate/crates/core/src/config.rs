//! Chirp and array parameters of the FMCW radar.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// FMCW chirp and antenna-array configuration.
///
/// Spacings are stored in metres. The wavelength and the beat-frequency slope
/// are derived on demand from the stored carrier, bandwidth and chirp duration
/// so they can never drift out of sync.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarConfig {
    /// Start frequency of the chirp, f_c (Hz).
    pub carrier_freq_hz: f64,
    /// Swept bandwidth, B (Hz).
    pub bandwidth_hz: f64,
    /// Chirp duration, T_c (s).
    pub chirp_duration_s: f64,
    /// Pulse repetition interval, T (s).
    pub pri_s: f64,
    /// ADC sampling interval within a chirp, T_f (s).
    pub adc_interval_s: f64,
    pub samples_per_chirp: usize,
    pub chirps_per_frame: usize,
    pub frame_rate_hz: f64,
    pub num_tx: usize,
    pub num_rx: usize,
    /// Transmit element spacing, d (m).
    pub tx_spacing_m: f64,
    /// Receive (virtual) element spacing, d_r (m).
    pub rx_spacing_m: f64,
}

impl Default for RadarConfig {
    /// A 77 GHz, 4 GHz-bandwidth radar resembling the AWR1843: three transmit
    /// elements one wavelength apart and an 8-element half-wavelength receive
    /// array. The ADC window spans the whole chirp.
    fn default() -> Self {
        let carrier = 77e9;
        let wavelength = SPEED_OF_LIGHT / carrier;
        let samples = 512;
        let adc = 1e-7;
        Self {
            carrier_freq_hz: carrier,
            bandwidth_hz: 4e9,
            chirp_duration_s: samples as f64 * adc,
            pri_s: 60e-6,
            adc_interval_s: adc,
            samples_per_chirp: samples,
            chirps_per_frame: 1,
            frame_rate_hz: 20.0,
            num_tx: 3,
            num_rx: 8,
            tx_spacing_m: wavelength,
            rx_spacing_m: wavelength / 2.0,
        }
    }
}

impl RadarConfig {
    /// λ = c / f_c.
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq_hz
    }

    /// α = 2B / (c T_c): beat frequency per metre of range (Hz/m).
    pub fn chirp_slope_factor(&self) -> f64 {
        2.0 * self.bandwidth_hz / (SPEED_OF_LIGHT * self.chirp_duration_s)
    }

    /// Nyquist frequency of the fast-time ADC.
    pub fn nyquist_hz(&self) -> f64 {
        0.5 / self.adc_interval_s
    }

    /// Largest range whose beat frequency stays below Nyquist.
    pub fn max_unambiguous_range(&self) -> f64 {
        self.nyquist_hz() / self.chirp_slope_factor()
    }

    /// Beat frequency αR of a reflector at `range_m`.
    pub fn beat_frequency(&self, range_m: f64) -> f64 {
        self.chirp_slope_factor() * range_m
    }

    /// Start time of slow-time chirp `m` relative to the first chirp.
    pub fn chirp_start(&self, m: usize) -> f64 {
        let frame = m / self.chirps_per_frame;
        let chirp = m % self.chirps_per_frame;
        frame as f64 / self.frame_rate_hz + chirp as f64 * self.pri_s
    }

    /// Number of frames covering `duration_s`.
    pub fn frames_for(&self, duration_s: f64) -> usize {
        (duration_s * self.frame_rate_hz).round() as usize
    }

    /// Checks every invariant of the configuration.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_freq_hz", self.carrier_freq_hz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("chirp_duration_s", self.chirp_duration_s),
            ("pri_s", self.pri_s),
            ("adc_interval_s", self.adc_interval_s),
            ("frame_rate_hz", self.frame_rate_hz),
            ("tx_spacing_m", self.tx_spacing_m),
            ("rx_spacing_m", self.rx_spacing_m),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {value}")));
            }
        }
        if self.pri_s < self.chirp_duration_s {
            return Err(Error::InvalidConfig("pri_s must be at least chirp_duration_s".into()));
        }
        if self.samples_per_chirp == 0 || self.chirps_per_frame == 0 {
            return Err(Error::InvalidConfig("sample and chirp counts must be non-zero".into()));
        }
        if self.num_tx == 0 || self.num_rx == 0 {
            return Err(Error::InvalidConfig("antenna counts must be non-zero".into()));
        }
        // ADC window must fit in the chirp (small relative slack for float noise).
        let adc_window = self.samples_per_chirp as f64 * self.adc_interval_s;
        if adc_window > self.chirp_duration_s * (1.0 + 1e-12) {
            return Err(Error::InvalidConfig(format!(
                "samples_per_chirp * adc_interval_s = {adc_window} exceeds chirp duration"
            )));
        }
        let frame_span = self.chirps_per_frame as f64 * self.pri_s;
        if frame_span > 1.0 / self.frame_rate_hz {
            return Err(Error::InvalidConfig(
                "chirps of one frame exceed the frame period".into(),
            ));
        }
        Ok(())
    }
}
