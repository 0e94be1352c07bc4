//! Weighted multi-channel variational mode decomposition solved by ADMM.
//!
//! Frequencies inside the iteration are normalised to cycles per sample, so
//! `α` has the same meaning as in single-channel VMD.

use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vital::{AnalyticSpectra, ChannelWeights};

/// Constant term of the mode-update denominator.
///
/// The numerator sums the residual of all `L` channels, so `ChannelCount`
/// (`L + 2α(ω-ω_k)²`) is the exact minimiser of the augmented Lagrangian.
/// `Unit` (`1 + 2α(ω-ω_k)²`) matches it for `L = 1` and diverges for `L > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Denominator {
    #[default]
    ChannelCount,
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VmdParams {
    /// Bandwidth penalty.
    pub alpha: f64,
    /// Dual ascent step; 0 disables the multiplier update.
    pub eta: f64,
    /// Relative-change stopping tolerance.
    pub tol: f64,
    pub max_iter: usize,
    pub denominator: Denominator,
}

impl Default for VmdParams {
    fn default() -> Self {
        Self {
            alpha: 2000.0,
            eta: 0.0,
            tol: 1e-7,
            max_iter: 500,
            denominator: Denominator::ChannelCount,
        }
    }
}

impl VmdParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig("vmd alpha must be positive".into()));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidConfig("vmd eta must be non-negative".into()));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidConfig("vmd tol and max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Decomposed modes sorted by ascending centre frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    /// `[mode k][sample t]`, same length as the analysed sequence.
    pub modes: Array2<f64>,
    pub center_freqs_hz: Vec<f64>,
    /// Final multipliers `[channel][bin]`.
    pub lagrange: Vec<Vec<Complex64>>,
    pub iterations: usize,
    pub converged: bool,
    pub sample_rate: f64,
    /// Relative change after every iteration.
    pub trace: Vec<f64>,
}

impl ModeSet {
    pub fn k(&self) -> usize {
        self.modes.nrows()
    }

    pub fn len(&self) -> usize {
        self.modes.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// `Σ_k u_k(t)`.
    pub fn reconstruction(&self) -> Vec<f64> {
        self.modes.sum_axis(ndarray::Axis(0)).to_vec()
    }

    /// Writes `iteration,relative_change` rows.
    pub fn write_trace_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "iteration,relative_change")?;
        for (i, v) in self.trace.iter().enumerate() {
            writeln!(out, "{},{v}", i + 1)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Initial centre frequencies spread evenly over (0, fs/4], normalised.
pub fn initial_omegas(k: usize) -> Vec<f64> {
    (0..k).map(|i| 0.25 * (i + 1) as f64 / k as f64).collect()
}

/// Jointly decomposes the weighted channel spectra `w_l S_l` into `k` modes.
///
/// Modes are updated in Gauss-Seidel order, then their centre frequencies,
/// then (for `eta > 0`) each channel's multiplier. Iteration stops once
/// `Σ_k ‖u_k⁺ - u_k‖² / ‖u_k‖²` falls below `tol`. Each mode is finally
/// zero-padded to the full spectrum length and inverse transformed.
pub fn wmc_vmd(spectra: &AnalyticSpectra, weights: &ChannelWeights, k: usize, params: &VmdParams) -> Result<ModeSet> {
    params.validate()?;
    let l = spectra.channels();
    if weights.len() != l {
        return Err(Error::LengthMismatch {
            expected: l,
            actual: weights.len(),
        });
    }
    if k == 0 || l == 0 {
        return Err(Error::InvalidArgument("need at least one mode and one channel".into()));
    }
    let n = spectra.full_len;
    let nb = spectra.bin_count();
    if nb == 0 || nb > n / 2 + 1 {
        return Err(Error::InvalidArgument(format!("{nb} bins for sequence length {n}")));
    }
    let freqs: Vec<f64> = (0..nb).map(|b| b as f64 / n as f64).collect();
    let targets: Vec<Vec<Complex64>> = spectra
        .bins
        .iter()
        .zip(&weights.w)
        .map(|(s, w)| s.iter().map(|z| z * *w).collect())
        .collect();
    let target_sum: Vec<Complex64> = (0..nb).map(|b| targets.iter().map(|t| t[b]).sum()).collect();
    let channels = l as f64;
    let base = match params.denominator {
        Denominator::ChannelCount => channels,
        Denominator::Unit => 1.0,
    };

    let zero = Complex64::new(0.0, 0.0);
    let mut u = vec![vec![zero; nb]; k];
    let mut omega = initial_omegas(k);
    let mut lambda = vec![vec![zero; nb]; l];
    let mut lambda_sum = vec![zero; nb];
    let mut total = vec![zero; nb];
    let mut trace = Vec::new();
    let mut converged = false;

    for _ in 0..params.max_iter {
        let mut change = 0.0;
        for (mode, w_k) in u.iter_mut().zip(omega.iter_mut()) {
            let mut diff = 0.0;
            let mut prev = 0.0;
            let (mut num, mut den) = (0.0, 0.0);
            for b in 0..nb {
                let others = total[b] - mode[b];
                let fresh = (target_sum[b] + lambda_sum[b] * 0.5 - others * channels)
                    / (base + 2.0 * params.alpha * (freqs[b] - *w_k).powi(2));
                if !(fresh.re.is_finite() && fresh.im.is_finite()) {
                    return Err(Error::NonFinite("vmd mode"));
                }
                diff += (fresh - mode[b]).norm_sqr();
                prev += mode[b].norm_sqr();
                let p = fresh.norm_sqr();
                num += freqs[b] * p;
                den += p;
                total[b] = others + fresh;
                mode[b] = fresh;
            }
            if den > 0.0 {
                *w_k = num / den;
            }
            change += if prev > 0.0 {
                diff / prev
            } else if diff > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
        }
        if params.eta > 0.0 {
            for (lam, tgt) in lambda.iter_mut().zip(&targets) {
                for b in 0..nb {
                    lam[b] += (tgt[b] - total[b]) * params.eta;
                }
            }
            for b in 0..nb {
                lambda_sum[b] = lambda.iter().map(|lam| lam[b]).sum();
            }
        }
        trace.push(change);
        if change < params.tol {
            converged = true;
            break;
        }
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| omega[a].total_cmp(&omega[b]));
    let ifft = FftPlanner::<f64>::new().plan_fft_inverse(n);
    let mut modes = Array2::zeros((k, n));
    let mut buf = vec![zero; n];
    for (row, &src) in order.iter().enumerate() {
        buf.iter_mut().for_each(|z| *z = zero);
        buf[..nb].copy_from_slice(&u[src]);
        ifft.process(&mut buf);
        for (t, z) in buf.iter().enumerate() {
            modes[[row, t]] = z.re / n as f64;
        }
    }
    Ok(ModeSet {
        modes,
        center_freqs_hz: order.iter().map(|&i| omega[i] * spectra.sample_rate).collect(),
        lagrange: lambda,
        iterations: trace.len(),
        converged,
        sample_rate: spectra.sample_rate,
        trace,
    })
}
