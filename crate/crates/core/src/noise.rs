//! Label-noise adversaries.
//!
//! A Massart adversary first gets a random set of *corruptible* samples, each
//! sample independently with probability `η < 1/2`, and then may replace the
//! label of any corruptible sample by an arbitrary value (or leave it alone).
//! The corruptible mask is drawn from the seed alone; the adversary sees the
//! whole dataset when choosing replacement labels.
//!
//! The oblivious adversary adds an `⌊ηm⌋`-sparse vector to the labels without
//! looking at the covariates. [`inflated_massart_rate`] gives the Massart rate
//! that suffices to simulate it.

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::LabeledDataset;
use crate::linalg::{dot, norm};
use crate::rng::seeded;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("Massart noise rate must lie in [0, 1/2), got {0}")]
    InvalidNoiseRate(f64),
    #[error("oblivious noise rate must lie in [0, 1], got {0}")]
    InvalidObliviousRate(f64),
    #[error("simulating this oblivious adversary needs Massart rate {rate} >= 1/2")]
    SimulationInfeasible { rate: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Which corruptible points the gated strategy actually touches.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GatePredicate {
    /// Some coordinate of `x` is strictly greater than `threshold`.
    AnyCoordinateAbove { threshold: f64 },
    /// `‖x‖ > threshold`.
    NormAbove { threshold: f64 },
    /// `normal · x ≥ 0`.
    Halfspace { normal: Vec<f64> },
}

impl GatePredicate {
    pub fn accepts(&self, x: &[f64]) -> bool {
        match self {
            GatePredicate::AnyCoordinateAbove { threshold } => x.iter().any(|v| v > threshold),
            GatePredicate::NormAbove { threshold } => norm(x) > *threshold,
            GatePredicate::Halfspace { normal } => dot(normal, x) >= 0.0,
        }
    }
}

/// Serializable corruption strategies.
///
/// ```json
/// {"kind":"gated","predicate":{"kind":"any_coordinate_above","threshold":2.5},
///  "inner":{"kind":"flip_negate"}}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CorruptionStrategy {
    /// `y ↦ -y`.
    FlipNegate,
    /// `y ↦ factor · y`.
    Scale { factor: f64 },
    /// `y ↦ value`.
    Constant { value: f64 },
    /// Apply `inner` only to corruptible points accepted by `predicate`.
    Gated { predicate: GatePredicate, inner: Box<CorruptionStrategy> },
}

impl CorruptionStrategy {
    /// The workhorse adversary of the synthetic experiments: negate the label of
    /// any corruptible point with a coordinate above `d/2`.
    pub fn gated_flip(dim: usize) -> Self {
        CorruptionStrategy::Gated {
            predicate: GatePredicate::AnyCoordinateAbove { threshold: dim as f64 / 2.0 },
            inner: Box::new(CorruptionStrategy::FlipNegate),
        }
    }

    fn apply(&self, x: &[f64], y: f64) -> Option<f64> {
        match self {
            CorruptionStrategy::FlipNegate => Some(-y),
            CorruptionStrategy::Scale { factor } => Some(factor * y),
            CorruptionStrategy::Constant { value } => Some(*value),
            CorruptionStrategy::Gated { predicate, inner } => {
                if predicate.accepts(x) {
                    inner.apply(x, y)
                } else {
                    None
                }
            }
        }
    }
}

/// A Massart adversary: given the dataset and the corruptible mask, choose a
/// replacement label (or `None` to leave it) for every corruptible sample.
/// Returned values for non-corruptible samples are ignored.
pub trait Adversary {
    fn corrupt(&self, data: &LabeledDataset, corruptible: &[bool]) -> Vec<Option<f64>>;
}

impl Adversary for CorruptionStrategy {
    fn corrupt(&self, data: &LabeledDataset, corruptible: &[bool]) -> Vec<Option<f64>> {
        data.iter().zip(corruptible).map(|((x, y), &c)| if c { self.apply(x, y) } else { None }).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassartSpec {
    pub eta: f64,
    pub strategy: CorruptionStrategy,
    pub seed: u64,
}

impl MassartSpec {
    pub fn new(eta: f64, strategy: CorruptionStrategy, seed: u64) -> Result<Self, NoiseError> {
        validate_massart_rate(eta)?;
        Ok(Self { eta, strategy, seed })
    }
}

/// Ground truth of a corruption run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptionRecord {
    /// `true` where the adversary replaced the label.
    pub mask: Vec<bool>,
    /// Labels before corruption.
    pub originals: Vec<f64>,
}

impl CorruptionRecord {
    pub fn corrupted_count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }
}

fn validate_massart_rate(eta: f64) -> Result<(), NoiseError> {
    if !(0.0..0.5).contains(&eta) {
        return Err(NoiseError::InvalidNoiseRate(eta));
    }
    Ok(())
}

/// Corruptible mask: sample `i` is corruptible iff the `i`-th uniform draw of
/// the seeded stream is below `η`.
pub fn corruptible_mask(m: usize, eta: f64, seed: u64) -> Vec<bool> {
    let mut rng = seeded(seed);
    (0..m).map(|_| rng.random::<f64>() < eta).collect()
}

pub fn corrupt_massart(
    clean: &LabeledDataset,
    spec: &MassartSpec,
) -> Result<(LabeledDataset, CorruptionRecord), NoiseError> {
    corrupt_massart_with(clean, spec.eta, spec.seed, &spec.strategy)
}

/// Massart corruption with an arbitrary adversary.
pub fn corrupt_massart_with(
    clean: &LabeledDataset,
    eta: f64,
    seed: u64,
    adversary: &dyn Adversary,
) -> Result<(LabeledDataset, CorruptionRecord), NoiseError> {
    validate_massart_rate(eta)?;
    let corruptible = corruptible_mask(clean.len(), eta, seed);
    let choices = adversary.corrupt(clean, &corruptible);
    if choices.len() != clean.len() {
        return Err(NoiseError::InvalidArgument(format!(
            "adversary returned {} labels for {} samples",
            choices.len(),
            clean.len()
        )));
    }
    let mut labels = clean.labels().to_vec();
    let mut mask = vec![false; clean.len()];
    for (i, choice) in choices.into_iter().enumerate() {
        if let (true, Some(v)) = (corruptible[i], choice) {
            labels[i] = v;
            mask[i] = true;
        }
    }
    let record = CorruptionRecord { mask: mask.clone(), originals: clean.labels().to_vec() };
    Ok((clean.with_labels(labels, Some(mask)), record))
}

/// Adds `±b_magnitude` at exactly `⌊ηm⌋` uniformly random positions.
pub fn corrupt_oblivious(clean_labels: &[f64], eta: f64, b_magnitude: f64, seed: u64) -> Result<Vec<f64>, NoiseError> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(NoiseError::InvalidObliviousRate(eta));
    }
    if !b_magnitude.is_finite() {
        return Err(NoiseError::InvalidArgument(format!("b_magnitude must be finite, got {b_magnitude}")));
    }
    let m = clean_labels.len();
    let count = ((eta * m as f64).floor() as usize).min(m);
    let mut rng = seeded(seed);
    let mut out = clean_labels.to_vec();
    for pos in index::sample(&mut rng, m, count) {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        out[pos] += sign * b_magnitude;
    }
    Ok(out)
}

/// `η' = η + sqrt(ln(1/δ) / (2m))`: a Massart adversary with rate `η'`
/// simulates an `η`-oblivious adversary on `m` samples with probability `1 - δ`.
pub fn inflated_massart_rate(eta: f64, m: usize, delta: f64) -> Result<f64, NoiseError> {
    if m == 0 {
        return Err(NoiseError::InvalidArgument("m must be at least 1".into()));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(NoiseError::InvalidArgument(format!("delta must lie in (0, 1], got {delta}")));
    }
    if !(0.0..1.0).contains(&eta) {
        return Err(NoiseError::InvalidObliviousRate(eta));
    }
    let rate = eta + ((1.0 / delta).ln() / (2.0 * m as f64)).sqrt();
    if rate >= 0.5 {
        return Err(NoiseError::SimulationInfeasible { rate });
    }
    Ok(rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line_data(m: usize, dim: usize, seed: u64) -> LabeledDataset {
        let mut rng = seeded(seed);
        let xs: Vec<Vec<f64>> = (0..m).map(|_| (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
        let w: Vec<f64> = (1..=dim).map(|i| i as f64).collect();
        LabeledDataset::realizable(xs, &w, |t| t).unwrap()
    }

    #[test]
    fn zero_rate_is_identity() {
        let data = line_data(200, 3, 1);
        let spec = MassartSpec::new(0.0, CorruptionStrategy::FlipNegate, 9).unwrap();
        let (out, rec) = corrupt_massart(&data, &spec).unwrap();
        assert_eq!(out.labels(), data.labels());
        assert!(rec.mask.iter().all(|&b| !b));
    }

    #[test]
    fn rejects_rate_at_breakdown() {
        assert_eq!(MassartSpec::new(0.5, CorruptionStrategy::FlipNegate, 0), Err(NoiseError::InvalidNoiseRate(0.5)));
        let data = line_data(5, 2, 0);
        assert!(corrupt_massart_with(&data, 0.7, 0, &CorruptionStrategy::FlipNegate).is_err());
    }

    #[test]
    fn gated_flip_only_touches_gated_points() {
        let d = 4;
        let data = line_data(2000, d, 2);
        let spec = MassartSpec::new(0.4, CorruptionStrategy::gated_flip(d), 5).unwrap();
        let (out, rec) = corrupt_massart(&data, &spec).unwrap();
        let flagged = corruptible_mask(data.len(), 0.4, 5);
        let mut touched = 0;
        for i in 0..data.len() {
            let gated = data.x(i).iter().any(|&v| v > d as f64 / 2.0);
            if rec.mask[i] {
                touched += 1;
                assert!(gated && flagged[i]);
                assert_eq!(out.y(i), -data.y(i));
            } else {
                assert_eq!(out.y(i), data.y(i));
                assert!(!(gated && flagged[i]));
            }
        }
        assert!(touched > 0);
        assert_eq!(out.corrupted_mask().unwrap(), rec.mask.as_slice());
    }

    #[test]
    fn ungated_rate_concentrates() {
        let data = line_data(10_000, 2, 3);
        let spec = MassartSpec::new(0.3, CorruptionStrategy::FlipNegate, 77).unwrap();
        let (_, rec) = corrupt_massart(&data, &spec).unwrap();
        let frac = rec.corrupted_count() as f64 / 10_000.0;
        // 0.015 is more than three binomial standard deviations (0.0046).
        assert!((frac - 0.3).abs() <= 0.015, "{frac}");
    }

    #[test]
    fn strategies_json_vocabulary() {
        let s = CorruptionStrategy::gated_flip(6);
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(
            js,
            r#"{"kind":"gated","predicate":{"kind":"any_coordinate_above","threshold":3.0},"inner":{"kind":"flip_negate"}}"#
        );
        let back: CorruptionStrategy = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        let scale: CorruptionStrategy = serde_json::from_str(r#"{"kind":"scale","factor":-100}"#).unwrap();
        assert_eq!(scale, CorruptionStrategy::Scale { factor: -100.0 });
        let c: CorruptionStrategy = serde_json::from_str(r#"{"kind":"constant","value":2.5}"#).unwrap();
        assert_eq!(c, CorruptionStrategy::Constant { value: 2.5 });
    }

    #[test]
    fn oblivious_examples() {
        let labels: Vec<f64> = (0..1000).map(|i| i as f64 * 0.5).collect();
        assert_eq!(corrupt_oblivious(&labels, 0.0, 5.0, 1).unwrap(), labels);
        let full = corrupt_oblivious(&labels, 1.0, 5.0, 1).unwrap();
        assert!(full.iter().zip(&labels).all(|(a, b)| (a - b).abs() == 5.0));
        let quarter = corrupt_oblivious(&labels, 0.25, 5.0, 1).unwrap();
        assert_eq!(quarter.iter().zip(&labels).filter(|(a, b)| a != b).count(), 250);
        assert!(corrupt_oblivious(&labels, 1.5, 5.0, 1).is_err());
    }

    #[test]
    fn inflated_rate_examples() {
        assert_eq!(inflated_massart_rate(0.2, 1000, 1.0).unwrap(), 0.2);
        // Reference value from a 30-digit evaluation of the closed form.
        let r = inflated_massart_rate(0.2, 1000, 0.1).unwrap();
        assert!((r - 0.233_930_702_122_075_56).abs() < 1e-12, "{r}");
        match inflated_massart_rate(0.49, 100, 0.01) {
            Err(NoiseError::SimulationInfeasible { rate }) => assert!((rate - 0.641_742_712_938_514_6).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        assert!(inflated_massart_rate(0.2, 0, 0.5).is_err());
        assert!(inflated_massart_rate(0.2, 10, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn mask_ignores_covariates(seed in any::<u64>(), m in 1usize..300, eta in 0.0f64..0.5, shift in -10.0f64..10.0) {
            let a = line_data(m, 3, 1);
            let shifted: Vec<Vec<f64>> = a.covariates().iter().map(|x| x.iter().map(|v| v + shift).collect()).collect();
            let b = LabeledDataset::new(shifted, a.labels().to_vec()).unwrap();
            let (_, ra) = corrupt_massart_with(&a, eta, seed, &CorruptionStrategy::FlipNegate).unwrap();
            let (_, rb) = corrupt_massart_with(&b, eta, seed, &CorruptionStrategy::FlipNegate).unwrap();
            prop_assert_eq!(&ra.mask, &rb.mask);
            // Gating only refines the corruptible mask.
            let gate = CorruptionStrategy::Gated {
                predicate: GatePredicate::NormAbove { threshold: 4.0 },
                inner: Box::new(CorruptionStrategy::FlipNegate),
            };
            let (_, rg) = corrupt_massart_with(&a, eta, seed, &gate).unwrap();
            for (g, u) in rg.mask.iter().zip(&ra.mask) {
                prop_assert!(!g || *u);
            }
        }

        #[test]
        fn corruption_is_deterministic(seed in any::<u64>(), eta in 0.0f64..0.5) {
            let data = line_data(100, 2, 4);
            let spec = MassartSpec::new(eta, CorruptionStrategy::Scale { factor: -100.0 }, seed).unwrap();
            let (a, _) = corrupt_massart(&data, &spec).unwrap();
            let (b, _) = corrupt_massart(&data, &spec).unwrap();
            prop_assert!(a.labels().iter().zip(b.labels()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }
}
