use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vital::PhaseMatrix;

/// Per-channel weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelWeights {
    pub w: Vec<f64>,
}

impl ChannelWeights {
    pub fn uniform(l: usize) -> Self {
        Self {
            w: vec![1.0 / l as f64; l],
        }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// `Σ_l w_l s_l(t)`.
    pub fn combine(&self, s: &PhaseMatrix) -> Result<Vec<f64>> {
        if self.len() != s.channels() {
            return Err(Error::LengthMismatch {
                expected: s.channels(),
                actual: self.len(),
            });
        }
        Ok((0..s.len())
            .map(|t| self.w.iter().enumerate().map(|(l, w)| w * s.data[[l, t]]).sum())
            .collect())
    }
}

/// Minimum-variance weights `w = G⁻¹1 / (1ᵀG⁻¹1)` with `G = ssᵀ + 1e-9·tr(ssᵀ)·I`.
pub fn adaptive_weights(s: &PhaseMatrix) -> Result<ChannelWeights> {
    let l = s.channels();
    if l == 0 || s.is_empty() {
        return Err(Error::InvalidArgument("empty phase matrix".into()));
    }
    let m = DMatrix::from_fn(l, s.len(), |i, t| s.data[[i, t]]);
    let mut g = &m * m.transpose();
    let reg = 1e-9 * g.trace();
    if !(reg > 0.0 && reg.is_finite()) {
        return Err(Error::Singular);
    }
    for i in 0..l {
        g[(i, i)] += reg;
    }
    let x = g
        .cholesky()
        .ok_or(Error::Singular)?
        .solve(&DVector::from_element(l, 1.0));
    let total: f64 = x.sum();
    if !(total.is_finite() && total != 0.0) {
        return Err(Error::Singular);
    }
    Ok(ChannelWeights {
        w: x.iter().map(|v| v / total).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::Array2;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn matrix(rows: Vec<Vec<f64>>) -> PhaseMatrix {
        let l = rows.len();
        let n = rows[0].len();
        PhaseMatrix {
            data: Array2::from_shape_vec((l, n), rows.concat()).unwrap(),
            sample_rate: 20.0,
            center_bin: 0,
        }
    }

    fn variance(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
    }

    #[test]
    fn identical_channels_get_uniform_weights() {
        let row: Vec<f64> = (0..100).map(|t| (t as f64 * 0.1).sin()).collect();
        let w = adaptive_weights(&matrix(vec![row.clone(); 5])).unwrap();
        for v in &w.w {
            assert_relative_eq!(*v, 0.2, epsilon = 1e-6);
        }
    }

    #[test]
    fn orthogonal_channels_weight_by_inverse_energy() {
        // Rows with disjoint support give a diagonal ssᵀ = diag(E1, E2).
        let a = vec![1.0, 2.0, 0.0, 0.0];
        let b = vec![0.0, 0.0, 3.0, -1.0];
        let (e1, e2) = (5.0, 10.0);
        let w = adaptive_weights(&matrix(vec![a, b])).unwrap();
        let norm = 1.0 / e1 + 1.0 / e2;
        assert_relative_eq!(w.w[0], (1.0 / e1) / norm, epsilon = 1e-8);
        assert_relative_eq!(w.w[1], (1.0 / e2) / norm, epsilon = 1e-8);
    }

    #[test]
    fn zero_input_is_singular() {
        assert!(matches!(
            adaptive_weights(&matrix(vec![vec![0.0; 10]; 3])),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn combine_checks_length() {
        let s = matrix(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(
            ChannelWeights { w: vec![0.5, 0.5] }.combine(&s).unwrap(),
            vec![2.0, 3.0]
        );
        assert!(ChannelWeights::uniform(3).combine(&s).is_err());
    }

    fn random_matrix(rng: &mut ChaCha8Rng, l: usize, n: usize) -> PhaseMatrix {
        let common: Vec<f64> = (0..n).map(|t| (t as f64 * 0.07).sin()).collect();
        let rows = (0..l)
            .map(|_| {
                let gain = rng.random_range(0.5..2.0);
                let noise = rng.random_range(0.01..1.0);
                common
                    .iter()
                    .map(|c| gain * c + noise * rng.random_range(-1.0..1.0))
                    .collect()
            })
            .collect();
        matrix(rows)
    }

    proptest! {
        #[test]
        fn weights_sum_to_one(seed in 0u64..10_000, l in 1usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_matrix(&mut rng, l, 64);
            let w = adaptive_weights(&s).unwrap();
            prop_assert!((w.w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn variance_not_above_uniform_or_random_simplex(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_matrix(&mut rng, 5, 128);
            let w = adaptive_weights(&s).unwrap();
            let best = variance(&w.combine(&s).unwrap());
            let uni = variance(&ChannelWeights::uniform(5).combine(&s).unwrap());
            prop_assert!(best <= uni * (1.0 + 1e-9));
            for _ in 0..100 {
                let raw: Vec<f64> = (0..5).map(|_| -rng.random_range(1e-12f64..1.0).ln()).collect();
                let sum: f64 = raw.iter().sum();
                let u = ChannelWeights { w: raw.iter().map(|v| v / sum).collect() };
                prop_assert!(best <= variance(&u.combine(&s).unwrap()) * (1.0 + 1e-9));
            }
        }
    }
}
