//! Sampled check of the condition that makes the ℓ1 and ℓ0 minimizers agree:
//! for every nonzero `r`, perturbing `w*` by `r` moves the clean predictions
//! more in total than the corrupted ones.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::{fits, LabeledDataset, DEFAULT_FIT_TOL};
use crate::linalg::norm;
use crate::rng::seeded;

use super::Model;

const DIRECTION_SEED: u64 = 0x5eed_d1ec;

#[derive(Clone, Debug, PartialEq)]
pub struct StructuralCheck {
    pub holds: bool,
    pub worst_margin: f64,
    pub worst_direction: Vec<f64>,
    pub directions_tested: usize,
}

/// `Σ_good |f((w*+r)·x) − f(w*·x)| − Σ_bad |…|`, with good/bad decided by
/// whether `w*` fits the sample.
pub fn structural_margin(samples: &LabeledDataset, w_true: &[f64], model: Model, r: &[f64]) -> f64 {
    let shifted: Vec<f64> = w_true.iter().zip(r).map(|(a, b)| a + b).collect();
    samples
        .iter()
        .map(|(x, y)| {
            let base = model.predict(w_true, x);
            let delta = (model.predict(&shifted, x) - base).abs();
            if fits(y, base, DEFAULT_FIT_TOL) {
                delta
            } else {
                -delta
            }
        })
        .sum()
}

/// Directions: `±1` when `d = 1`, a uniform grid of `direction_budget` angles
/// when `d = 2`, otherwise `direction_budget` random unit vectors plus the
/// signed coordinate axes. The linear margin is homogeneous in `‖r‖`; for
/// ReLU several radii are tried.
pub fn check_structural_condition(
    samples: &LabeledDataset,
    w_true: &[f64],
    model: Model,
    direction_budget: usize,
) -> StructuralCheck {
    let d = samples.dim();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    match d {
        1 => dirs.extend([vec![1.0], vec![-1.0]]),
        2 => {
            let n = direction_budget.max(1);
            dirs.extend((0..n).map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                vec![t.cos(), t.sin()]
            }));
        }
        _ => {
            let mut rng = seeded(DIRECTION_SEED);
            for _ in 0..direction_budget {
                let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                let n = norm(&v);
                if n > 0.0 {
                    dirs.push(v.iter().map(|a| a / n).collect());
                }
            }
            for k in 0..d {
                for s in [1.0, -1.0] {
                    let mut e = vec![0.0; d];
                    e[k] = s;
                    dirs.push(e);
                }
            }
        }
    }
    let radii: Vec<f64> = match model {
        Model::Linear => vec![1.0],
        Model::Relu => {
            let base = 1.0 + norm(w_true);
            [1e-3, 1e-2, 1e-1, 1.0, 10.0].iter().map(|s| s * base).collect()
        }
    };

    let mut worst = f64::INFINITY;
    let mut worst_direction = vec![0.0; d];
    let mut tested = 0;
    for u in &dirs {
        for &rad in &radii {
            let r: Vec<f64> = u.iter().map(|a| a * rad).collect();
            // Normalize so radii are comparable.
            let margin = structural_margin(samples, w_true, model, &r) / rad;
            tested += 1;
            if margin < worst {
                worst = margin;
                worst_direction = r;
            }
        }
    }
    StructuralCheck { holds: worst > 0.0, worst_margin: worst, worst_direction, directions_tested: tested }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;

    fn clean_mass(samples: &LabeledDataset, r: &[f64]) -> f64 {
        samples.iter().map(|(x, _)| dot(r, x).abs()).sum()
    }

    #[test]
    fn clean_data_holds_with_full_mass() {
        let xs = vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![1.0, 1.0]];
        let data = LabeledDataset::realizable(xs, &[1.0, 1.0], |t| t).unwrap();
        let check = check_structural_condition(&data, &[1.0, 1.0], Model::Linear, 360);
        assert!(check.holds);
        let r = &check.worst_direction;
        assert!((check.worst_margin - clean_mass(&data, r)).abs() < 1e-12);
    }

    #[test]
    fn dominated_direction_fails() {
        let data = LabeledDataset::new(vec![vec![1.0], vec![10.0]], vec![1.0, -50.0]).unwrap();
        let check = check_structural_condition(&data, &[1.0], Model::Linear, 0);
        assert!(!check.holds);
        assert_eq!(check.worst_margin, 1.0 - 10.0);
    }

    #[test]
    fn relu_flat_side_contributes_only_when_crossing() {
        let data = LabeledDataset::new(vec![vec![-1.0]], vec![0.0]).unwrap();
        // x = -1 stays on the flat side until w turns negative.
        let m = structural_margin(&data, &[1.0], Model::Relu, &[-0.5]);
        assert_eq!(m, 0.0);
        let m = structural_margin(&data, &[1.0], Model::Relu, &[-3.0]);
        assert_eq!(m, 2.0);
    }
}
