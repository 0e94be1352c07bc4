use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{run_scenario_with, RunOptions, ScenarioSpec};
use crate::beamform::{rx_weights, tx_weights};
use crate::error::{Error, Result};
use crate::frontend::{default_n_fft, range_fft};
use crate::sim::synthesize_cube;
use crate::vital::{
    adaptive_weights, analytic_spectrum, estimate_rates, extract_phase, select_mode_count, truncate_spectrum, wmc_vmd,
};

/// Timing and accuracy of the decomposition at one spectrum size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n_keep: usize,
    pub full_bins: usize,
    pub median_ms: f64,
    /// Full-spectrum median time over this row's median time.
    pub speedup: f64,
    /// ADMM iterations to convergence.
    pub iterations: usize,
    pub rr_error_rpm: Option<f64>,
    pub hr_error_bpm: Option<f64>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Times `wmc_vmd` on the first target's phase for every `n_keep` (plus the
/// full spectrum) over `reps` repetitions. Localisation comes from a regular
/// run of `spec`.
pub fn bench_acceleration(spec: &ScenarioSpec, n_keeps: &[usize], reps: usize) -> Result<Vec<BenchRow>> {
    let out = run_scenario_with(spec, &RunOptions::default());
    if !out.report.ok {
        return Err(Error::InvalidArgument(format!(
            "scenario failed at {:?}: {}",
            out.report.failed_stage,
            out.report.error.unwrap_or_default()
        )));
    }
    let loc = &out.report.targets[0].location;
    let target = &spec.scene.targets[0];
    let cfg = &spec.radar;
    let p = &spec.pipeline;
    let n_fft = p.n_fft.unwrap_or_else(|| default_n_fft(cfg.samples_per_chirp));

    let (tx, combiner) = if p.beamforming {
        let lambda = cfg.wavelength();
        let tx = tx_weights(loc.angle_deg, cfg.tx_spacing_m, lambda, cfg.num_tx)?;
        (
            Some(tx.weights),
            rx_weights(loc.angle_deg, cfg.rx_spacing_m, lambda, cfg.num_rx)?.weights,
        )
    } else {
        let mut single = vec![Complex64::new(0.0, 0.0); cfg.num_rx];
        single[0] = Complex64::new(1.0, 0.0);
        (None, single)
    };
    let mut cube = synthesize_cube(&spec.scene, cfg, tx.as_deref())?;
    let reference = target.amplitude * target.amplitude;
    cube.add_noise(spec.snr_db, reference, spec.seed);
    let profiles = range_fft(&cube, n_fft, p.window)?;
    let phase = extract_phase(&profiles, &combiner, loc.range_bin, p.channels)?;
    let weights = adaptive_weights(&phase)?;
    let combined = weights.combine(&phase)?;
    let window = p.ssa_window.unwrap_or(combined.len() / 3);
    let k = select_mode_count(&combined, window, p.ssa_fraction, p.k_min, p.k_max)?;
    let full = analytic_spectrum(&phase)?;
    let full_bins = full.bin_count();

    let true_rr = target.vitals.breath_freq_hz * 60.0;
    let true_hr = target.vitals.heart_freq_hz * 60.0;
    let mut sizes = vec![full_bins];
    sizes.extend(n_keeps.iter().map(|&n| n.min(full_bins)));
    let truncated = sizes
        .iter()
        .map(|&n| truncate_spectrum(&full, n))
        .collect::<Result<Vec<_>>>()?;
    // Sizes are interleaved within each repetition so that load drift hits
    // all of them alike.
    let mut times = vec![Vec::with_capacity(reps.max(1)); sizes.len()];
    let mut last = Vec::with_capacity(sizes.len());
    for rep in 0..reps.max(1) {
        for (i, spectra) in truncated.iter().enumerate() {
            let start = Instant::now();
            let m = wmc_vmd(spectra, &weights, k, &p.vmd)?;
            times[i].push(start.elapsed().as_secs_f64() * 1e3);
            if rep == 0 {
                last.push(m);
            }
        }
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for ((&n_keep, t), modes) in sizes.iter().zip(times).zip(&last) {
        let rates = estimate_rates(modes, p.rr_band, p.hr_band);
        rows.push(BenchRow {
            n_keep,
            full_bins,
            median_ms: median(t),
            speedup: 1.0,
            iterations: modes.iterations,
            rr_error_rpm: rates.rr_rpm.map(|r| (r - true_rr).abs()),
            hr_error_bpm: rates.hr_bpm.map(|h| (h - true_hr).abs()),
        });
    }
    let base = rows[0].median_ms;
    for row in &mut rows {
        row.speedup = if row.n_keep == full_bins {
            1.0
        } else {
            base / row.median_ms
        };
    }
    Ok(rows)
}
