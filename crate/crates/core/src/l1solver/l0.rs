//! Brute-force ℓ0 minimization over interpolating subsets. A test oracle:
//! cost is `C(m, d) · m`.

use std::cmp::Ordering;

use itertools::Itertools;

use crate::dataset::{fits, LabeledDataset, DEFAULT_FIT_TOL};
use crate::linalg::{solve, Matrix};

use super::{L1Error, Model};

#[derive(Clone, Debug, PartialEq)]
pub struct L0Fit {
    pub w: Vec<f64>,
    pub fit_count: usize,
}

pub fn l0_fit_bruteforce(samples: &LabeledDataset, model: Model) -> Result<L0Fit, L1Error> {
    l0_fit_bruteforce_with(samples, model, DEFAULT_FIT_TOL)
}

/// Tries every `d`-subset whose covariates are independent, interpolating the
/// labels exactly on it. For ReLU the subset is taken on the active side
/// (`w·x = y`); points on the flat side leave `w` underdetermined, so the
/// all-flat pattern contributes the single candidate `w = 0`.
///
/// Returns the candidate fitting the most samples; ties go to the
/// lexicographically smallest `w`.
pub fn l0_fit_bruteforce_with(samples: &LabeledDataset, model: Model, fit_tol: f64) -> Result<L0Fit, L1Error> {
    let m = samples.len();
    let d = samples.dim();
    if m == 0 {
        return Err(L1Error::Empty);
    }
    let count = |w: &[f64]| samples.iter().filter(|(x, y)| fits(*y, model.predict(w, x), fit_tol)).count();

    let mut best: Option<L0Fit> = None;
    let consider = |w: Vec<f64>, best: &mut Option<L0Fit>| {
        let c = count(&w);
        let better = match best {
            None => true,
            Some(b) => c > b.fit_count || (c == b.fit_count && lex_cmp(&w, &b.w) == Ordering::Less),
        };
        if better {
            *best = Some(L0Fit { w, fit_count: c });
        }
    };

    let mut any_nonsingular = false;
    for subset in (0..m).combinations(d) {
        let rows: Vec<&[f64]> = subset.iter().map(|&i| samples.x(i)).collect();
        let rhs: Vec<f64> = subset.iter().map(|&i| samples.y(i)).collect();
        if model == Model::Relu && rhs.iter().any(|&y| y < 0.0) {
            continue;
        }
        let Some(w) = solve(&Matrix::from_rows(&rows), &rhs, 1e-12) else { continue };
        any_nonsingular = true;
        consider(w, &mut best);
    }
    if !any_nonsingular {
        return Err(L1Error::Degenerate);
    }
    if model == Model::Relu {
        consider(vec![0.0; d], &mut best);
    }
    Ok(best.expect("a nonsingular subset produced a candidate"))
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn realizable_returns_truth() {
        let mut rng = seeded(3);
        let xs: Vec<Vec<f64>> = (0..15).map(|_| (0..3).map(|_| rng.sample(StandardNormal)).collect()).collect();
        let data = LabeledDataset::realizable(xs, &[1.0, -2.0, 0.5], |t| t).unwrap();
        let fit = l0_fit_bruteforce(&data, Model::Linear).unwrap();
        assert_eq!(fit.fit_count, 15);
        for (a, b) in fit.w.iter().zip([1.0, -2.0, 0.5]) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn majority_line_wins() {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 1..=6 {
            xs.push(vec![i as f64]);
            ys.push(3.0 * i as f64);
        }
        for i in 1..=4 {
            xs.push(vec![i as f64 + 0.5]);
            ys.push(-(i as f64 + 0.5));
        }
        let fit = l0_fit_bruteforce(&LabeledDataset::new(xs, ys).unwrap(), Model::Linear).unwrap();
        assert_eq!(fit.w, vec![3.0]);
        assert_eq!(fit.fit_count, 6);
    }

    #[test]
    fn ties_break_lexicographically() {
        let data = LabeledDataset::new(vec![vec![1.0], vec![1.0]], vec![2.0, -1.0]).unwrap();
        let fit = l0_fit_bruteforce(&data, Model::Linear).unwrap();
        assert_eq!(fit.w, vec![-1.0]);
    }

    #[test]
    fn relu_planted_with_corruption() {
        let mut rng = seeded(11);
        let w_star = [2.0, -1.0];
        let xs: Vec<Vec<f64>> = (0..40).map(|_| (0..2).map(|_| rng.sample(StandardNormal)).collect()).collect();
        let mut ys: Vec<f64> = xs.iter().map(|x| Model::Relu.predict(&w_star, x)).collect();
        for y in ys.iter_mut().take(12) {
            *y = rng.random_range(1.0..5.0);
        }
        let data = LabeledDataset::new(xs, ys).unwrap();
        let fit = l0_fit_bruteforce(&data, Model::Relu).unwrap();
        assert!(fit.fit_count >= 28);
        for (a, b) in fit.w.iter().zip(w_star) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn all_singular_is_degenerate() {
        let data = LabeledDataset::new(vec![vec![1.0, 0.0], vec![2.0, 0.0]], vec![1.0, 2.0]).unwrap();
        assert_eq!(l0_fit_bruteforce(&data, Model::Linear), Err(L1Error::Degenerate));
    }
}
