use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::noise::{corrupt_massart, CorruptionRecord, CorruptionStrategy, MassartSpec, NoiseError};
use crate::rng::{derive_seed, seeded};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    pub w_star: Vec<f64>,
}

impl SyntheticSpec {
    /// The standard experiment: target `9e₂ + Σ eᵢ`.
    pub fn standard(d: usize, n: usize, seed: u64) -> Self {
        Self { d, n, seed, w_star: paper_target(d) }
    }
}

/// `9e₂ + Σ eᵢ` (just `e₁` when `d = 1`).
pub fn paper_target(d: usize) -> Vec<f64> {
    let mut w = vec![1.0; d];
    if d >= 2 {
        w[1] += 9.0;
    }
    w
}

/// Draws from `½N(e₁, I/d²) + (1/2d) Σᵢ N(d·eᵢ, I/d²)`.
pub fn sample_synthetic_mixture(spec: &SyntheticSpec) -> Vec<Vec<f64>> {
    let d = spec.d;
    let mut rng = seeded(spec.seed);
    let noise = Normal::new(0.0, 1.0 / d as f64).expect("positive scale");
    (0..spec.n)
        .map(|_| {
            let mut x: Vec<f64> = (0..d).map(|_| noise.sample(&mut rng)).collect();
            if rng.random::<f64>() < 0.5 {
                x[0] += 1.0;
            } else {
                let i = rng.random_range(0..d);
                x[i] += d as f64;
            }
            x
        })
        .collect()
}

/// Mixture covariates, realizable labels, then the gated-flip adversary at rate `eta`.
pub fn synthetic_instance(spec: &SyntheticSpec, eta: f64) -> Result<(LabeledDataset, CorruptionRecord), NoiseError> {
    let xs = sample_synthetic_mixture(spec);
    let clean =
        LabeledDataset::realizable(xs, &spec.w_star, |t| t).map_err(|e| NoiseError::InvalidArgument(e.to_string()))?;
    let noise = MassartSpec::new(eta, CorruptionStrategy::gated_flip(spec.d), derive_seed(spec.seed, 1))?;
    corrupt_massart(&clean, &noise)
}
