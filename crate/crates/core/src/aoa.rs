//! Range-angle heatmap from MVDR spectra.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::beamform::steering_vector;
use crate::error::{Error, Result};
use crate::frontend::RangeProfileCube;

const MIN_LOADING: f64 = 1e-12;

/// Uniform azimuth grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleGrid {
    pub start_deg: f64,
    pub step_deg: f64,
    pub bins: usize,
}

impl Default for AngleGrid {
    /// 1° steps over ±60°.
    fn default() -> Self {
        Self {
            start_deg: -60.0,
            step_deg: 1.0,
            bins: 121,
        }
    }
}

impl AngleGrid {
    pub fn angle(&self, bin: usize) -> f64 {
        self.start_deg + bin as f64 * self.step_deg
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.bins).map(|b| self.angle(b)).collect()
    }

    /// Nearest bin of `angle_deg`, if it lies on the grid.
    pub fn bin_of(&self, angle_deg: f64) -> Option<usize> {
        let b = ((angle_deg - self.start_deg) / self.step_deg).round();
        (b >= 0.0 && (b as usize) < self.bins).then_some(b as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins == 0 || !(self.step_deg > 0.0) {
            return Err(Error::InvalidConfig("angle grid needs bins and a positive step".into()));
        }
        let end = self.angle(self.bins - 1);
        if self.start_deg < -90.0 || end > 90.0 {
            return Err(Error::InvalidConfig("angle grid exceeds [-90, 90] deg".into()));
        }
        Ok(())
    }
}

/// MVDR power `[range bin][angle bin]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub power: Array2<f64>,
    pub angle_axis: Vec<f64>,
    pub range_axis: Vec<f64>,
}

impl Heatmap {
    pub fn range_bins(&self) -> usize {
        self.power.dim().0
    }

    pub fn angle_bins(&self) -> usize {
        self.power.dim().1
    }

    /// Cell of the global maximum; ties go to the smaller range, then angle.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        for ((r, a), &p) in self.power.indexed_iter() {
            if p > self.power[best] {
                best = (r, a);
            }
        }
        best
    }

    /// Writes `range_bin,angle_bin,power` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "range_bin,angle_bin,power")?;
        for ((r, a), p) in self.power.indexed_iter() {
            writeln!(out, "{r},{a},{p}")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Sample covariance of the channel snapshots at bin `r` over chirps
/// `[start, start + count)`, plus `loading · tr/K` on the diagonal. The
/// loading never drops below 1e-12 so an all-zero input stays invertible.
pub fn spatial_covariance(
    profiles: &RangeProfileCube,
    r: usize,
    start: usize,
    count: usize,
    loading: f64,
) -> Result<DMatrix<Complex64>> {
    if count == 0 {
        return Err(Error::EmptyWindow);
    }
    if r >= profiles.range_bins() {
        return Err(Error::OutOfRange {
            index: r,
            limit: profiles.range_bins(),
        });
    }
    if start + count > profiles.chirps() {
        return Err(Error::OutOfRange {
            index: start + count,
            limit: profiles.chirps(),
        });
    }
    let k = profiles.channels();
    let mut cov = DMatrix::<Complex64>::zeros(k, k);
    for m in start..start + count {
        let x = DVector::from_iterator(k, (0..k).map(|c| profiles.data[[r, m, c]]));
        cov += &x * x.adjoint();
    }
    cov /= Complex64::new(count as f64, 0.0);
    Ok(load(cov, loading))
}

fn load(mut cov: DMatrix<Complex64>, loading: f64) -> DMatrix<Complex64> {
    let k = cov.nrows();
    let trace = cov.trace().re;
    let delta = (loading * trace / k as f64).max(MIN_LOADING);
    for i in 0..k {
        cov[(i, i)] += delta;
    }
    cov
}

/// Covariance of explicit snapshot vectors, loaded as in [`spatial_covariance`].
pub fn snapshot_covariance(snapshots: &[Vec<Complex64>], loading: f64) -> Result<DMatrix<Complex64>> {
    let first = snapshots.first().ok_or(Error::EmptyWindow)?;
    let k = first.len();
    let mut cov = DMatrix::<Complex64>::zeros(k, k);
    for s in snapshots {
        if s.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                actual: s.len(),
            });
        }
        let x = DVector::from_column_slice(s);
        cov += &x * x.adjoint();
    }
    cov /= Complex64::new(snapshots.len() as f64, 0.0);
    Ok(load(cov, loading))
}

/// `P(θ) = 1 / (a(θ)ᴴ R⁻¹ a(θ))` for every angle of `grid`.
pub fn mvdr_spectrum(
    cov: &DMatrix<Complex64>,
    spacing_m: f64,
    wavelength_m: f64,
    grid: &AngleGrid,
) -> Result<Vec<f64>> {
    let k = cov.nrows();
    let herm = (cov + cov.adjoint()) * Complex64::new(0.5, 0.0);
    let chol = herm.cholesky().ok_or(Error::Singular)?;
    let l = chol.l();
    grid.angles()
        .into_iter()
        .map(|theta| {
            let a = DVector::from_vec(steering_vector(k, spacing_m, wavelength_m, theta));
            // aᴴ R⁻¹ a = |L⁻¹ a|² with R = L Lᴴ.
            let y = l.solve_lower_triangular(&a).ok_or(Error::Singular)?;
            let q = y.norm_squared();
            if !(q.is_finite() && q > 0.0) {
                return Err(Error::Singular);
            }
            Ok(1.0 / q)
        })
        .collect()
}

/// MVDR spectrum of every range bin using chirps `[start, start + count)`.
pub fn range_angle_heatmap(
    profiles: &RangeProfileCube,
    grid: &AngleGrid,
    loading: f64,
    start: usize,
    count: usize,
) -> Result<Heatmap> {
    if profiles.range_bins() == 0 || profiles.channels() == 0 {
        return Err(Error::InvalidArgument("empty range profiles".into()));
    }
    let cfg = &profiles.config;
    let rows: Vec<Vec<f64>> = (0..profiles.range_bins())
        .into_par_iter()
        .map(|r| {
            let cov = spatial_covariance(profiles, r, start, count, loading)?;
            mvdr_spectrum(&cov, cfg.rx_spacing_m, cfg.wavelength(), grid)
        })
        .collect::<Result<_>>()?;
    let mut power = Array2::zeros((rows.len(), grid.bins));
    for (r, row) in rows.iter().enumerate() {
        for (a, p) in row.iter().enumerate() {
            power[[r, a]] = *p;
        }
    }
    Ok(Heatmap {
        power,
        angle_axis: grid.angles(),
        range_axis: profiles.range_axis.clone(),
    })
}

/// Conventional spatial spectrum: zero-padded FFT across the array, averaged
/// over snapshots and read off at the nearest FFT bin of each grid angle.
pub fn spatial_fft_spectrum(
    snapshots: &[Vec<Complex64>],
    n_fft: usize,
    spacing_m: f64,
    wavelength_m: f64,
    grid: &AngleGrid,
) -> Result<Vec<f64>> {
    let k = snapshots.first().ok_or(Error::EmptyWindow)?.len();
    if n_fft < k {
        return Err(Error::InvalidArgument(format!(
            "n_fft {n_fft} smaller than array size {k}"
        )));
    }
    // The steering phase ramp is e^{+j2πku}; an inverse transform peaks at bin u·n_fft.
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(n_fft);
    let mut avg = vec![0.0; n_fft];
    for s in snapshots {
        let mut buf = s.clone();
        buf.resize(n_fft, Complex64::new(0.0, 0.0));
        fft.process(&mut buf);
        for (acc, z) in avg.iter_mut().zip(&buf) {
            *acc += z.norm_sqr() / snapshots.len() as f64;
        }
    }
    Ok(grid
        .angles()
        .into_iter()
        .map(|theta| {
            let u = spacing_m * theta.to_radians().sin() / wavelength_m;
            let bin = (u * n_fft as f64).round().rem_euclid(n_fft as f64) as usize % n_fft;
            avg[bin]
        })
        .collect())
}

/// Indices of interior local maxima; a plateau reports its leftmost sample.
pub fn local_maxima(v: &[f64]) -> Vec<usize> {
    (1..v.len().saturating_sub(1))
        .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1])
        .collect()
}
