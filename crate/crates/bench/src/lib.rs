//! Fixed workloads shared by the criterion benches.

use massreg::harness::{synthetic_instance, SyntheticSpec};
use massreg::noise::{corrupt_massart, CorruptionStrategy, MassartSpec};
use massreg::rng::{derive_seed, seeded};
use massreg::LabeledDataset;
use rand_distr::{Distribution, StandardNormal};

/// Mixture covariates with the gated-flip adversary, as in the recovery-rate harness.
pub fn linear_workload(d: usize, m: usize, eta: f64, seed: u64) -> LabeledDataset {
    synthetic_instance(&SyntheticSpec::standard(d, m, seed), eta).expect("valid workload").0
}

/// Gaussian covariates, integer ReLU target `(1, −2, 3, …)`, constant-label adversary.
pub fn relu_workload(d: usize, m: usize, eta: f64, seed: u64) -> (LabeledDataset, Vec<f64>) {
    let mut rng = seeded(seed);
    let w: Vec<f64> = (0..d).map(|i| if i % 2 == 0 { (i + 1) as f64 } else { -((i + 1) as f64) }).collect();
    let xs: Vec<Vec<f64>> = (0..m).map(|_| (0..d).map(|_| StandardNormal.sample(&mut rng)).collect()).collect();
    let clean = LabeledDataset::realizable(xs, &w, |t| t.max(0.0)).expect("finite data");
    let spec =
        MassartSpec::new(eta, CorruptionStrategy::Constant { value: 1.0 }, derive_seed(seed, 1)).expect("eta < 1/2");
    (corrupt_massart(&clean, &spec).expect("corruption").0, w)
}

/// Points in general position for the isotropy benchmark.
pub fn gaussian_points(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seeded(seed);
    (0..n).map(|_| (0..d).map(|_| StandardNormal.sample(&mut rng)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workloads_are_deterministic() {
        assert_eq!(linear_workload(4, 50, 0.2, 1), linear_workload(4, 50, 0.2, 1));
        assert_eq!(relu_workload(3, 40, 0.2, 2), relu_workload(3, 40, 0.2, 2));
        assert_eq!(gaussian_points(10, 3, 5).len(), 10);
    }
}
