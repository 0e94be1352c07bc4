use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Number of modes from the singular spectrum of the lag-`window` Hankel
/// matrix `X` of `s`: the smallest `K` whose leading singular values of
/// `H = XXᵀ` hold at least `fraction` of their sum, clamped to `[k_min, k_max]`.
pub fn select_mode_count(s: &[f64], window: usize, fraction: f64, k_min: usize, k_max: usize) -> Result<usize> {
    let n = s.len();
    if window == 0 || window >= n {
        return Err(Error::InvalidArgument(format!("window {window} must be in [1, {n})")));
    }
    if !(fraction > 0.0 && fraction <= 1.0) || k_min == 0 || k_min > k_max {
        return Err(Error::InvalidArgument("invalid fraction or clamp".into()));
    }
    if s.iter().all(|v| *v == 0.0) {
        return Err(Error::ZeroSignal);
    }
    let values = hankel_singular_values(s, window);
    let total: f64 = values.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroSignal);
    }
    let mut acc = 0.0;
    let mut k = values.len();
    for (i, v) in values.iter().enumerate() {
        acc += v;
        if acc >= fraction * total {
            k = i + 1;
            break;
        }
    }
    Ok(k.clamp(k_min, k_max))
}

/// Singular values of `XXᵀ`, descending. `H` is symmetric positive
/// semidefinite, so these are its eigenvalues.
pub fn hankel_singular_values(s: &[f64], window: usize) -> Vec<f64> {
    let cols = s.len() - window + 1;
    let x = DMatrix::from_fn(window, cols, |i, j| s[i + j]);
    let h = &x * x.transpose();
    let mut values: Vec<f64> = h.symmetric_eigenvalues().iter().map(|v| v.max(0.0)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};
    use std::f64::consts::PI;

    fn sines(parts: &[(f64, f64)], n: usize, fs: f64) -> Vec<f64> {
        (0..n)
            .map(|t| {
                parts
                    .iter()
                    .map(|(a, f)| a * (2.0 * PI * f * t as f64 / fs + 0.3).sin())
                    .sum()
            })
            .collect()
    }

    /// Squared singular values of X from an SVD, which must equal the
    /// singular values of XXᵀ.
    fn svd_oracle(s: &[f64], window: usize) -> Vec<f64> {
        let x = DMatrix::from_fn(window, s.len() - window + 1, |i, j| s[i + j]);
        let mut v: Vec<f64> = x.svd(false, false).singular_values.iter().map(|v| v * v).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    fn oracle_k(values: &[f64], fraction: f64) -> usize {
        let total: f64 = values.iter().sum();
        let mut acc = 0.0;
        for (i, v) in values.iter().enumerate() {
            acc += v;
            if acc >= fraction * total {
                return i + 1;
            }
        }
        values.len()
    }

    #[test]
    fn pure_sinusoid_has_rank_two() {
        // Window and column count both span whole periods (80 samples).
        let s = sines(&[(1.0, 0.25)], 479, 20.0);
        let v = hankel_singular_values(&s, 160);
        let oracle = svd_oracle(&s, 160);
        for (a, b) in v.iter().zip(&oracle).take(5) {
            assert_relative_eq!(a, b, max_relative = 1e-8, epsilon = 1e-8 * oracle[0]);
        }
        assert!(v[2] < 1e-9 * v[0]);
        assert_relative_eq!(v[0], v[1], max_relative = 0.01);
        assert_eq!(select_mode_count(&s, 160, 0.7, 2, 8).unwrap(), 2);
    }

    #[test]
    fn two_sinusoids_match_svd_oracle() {
        for ratio in [1.0, 0.5, 0.2] {
            let s = sines(&[(1.0, 0.25), (ratio, 1.2)], 300, 20.0);
            let v = hankel_singular_values(&s, 100);
            assert!(v[4] < 1e-9 * v[0]);
            let expected = oracle_k(&svd_oracle(&s, 100), 0.7).clamp(2, 8);
            assert_eq!(select_mode_count(&s, 100, 0.7, 2, 8).unwrap(), expected);
        }
    }

    #[test]
    fn white_noise_hits_clamp() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = Normal::new(0.0, 1.0).unwrap();
        let s: Vec<f64> = (0..300).map(|_| n.sample(&mut rng)).collect();
        assert_eq!(select_mode_count(&s, 100, 0.7, 2, 8).unwrap(), 8);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            select_mode_count(&[0.0; 50], 10, 0.7, 2, 8),
            Err(Error::ZeroSignal)
        ));
        assert!(select_mode_count(&[1.0; 10], 10, 0.7, 2, 8).is_err());
        assert!(select_mode_count(&[1.0, 2.0, 3.0], 1, 1.5, 2, 8).is_err());
    }
}
