use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::l1solver::snap_to_rational;
use crate::linear::RecoveryConfig;
use crate::rng::derive_seed;

use super::methods::{fit_method, Method};
use super::synthetic::{synthetic_instance, SyntheticSpec};
use super::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "vary")]
pub enum BenchGrid {
    /// Vary the noise rate at a fixed sample count.
    Noise { etas: Vec<f64>, m: usize },
    /// Vary the sample count at a fixed noise rate.
    Samples { ms: Vec<usize>, eta: f64 },
}

impl BenchGrid {
    fn points(&self) -> Vec<(f64, usize)> {
        match self {
            BenchGrid::Noise { etas, m } => etas.iter().map(|&e| (e, *m)).collect(),
            BenchGrid::Samples { ms, eta } => ms.iter().map(|&m| (*eta, m)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub d: usize,
    pub methods: Vec<Method>,
    pub grid: BenchGrid,
    pub trials: usize,
    pub seed: u64,
    pub recovery: RecoveryConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: String,
    pub eta: f64,
    pub m: usize,
    pub trials: usize,
    pub successes: usize,
    /// Trials where the method returned an error; counted as failures.
    pub errors: usize,
    pub recovery_rate: f64,
    /// Two standard errors of the rate.
    pub error_bar: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
    /// Wall time per grid point in seconds. Not serialized, so reports stay
    /// byte-identical across runs.
    #[serde(skip)]
    pub wall_time_secs: Vec<f64>,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn row(&self, method: Method, eta: f64, m: usize) -> Option<&BenchRow> {
        let name = method.name();
        self.rows.iter().find(|r| r.method == name && r.eta == eta && r.m == m)
    }
}

/// Runs every method on the same corrupted instances, trial by trial.
/// A trial succeeds when the snapped estimate equals `w*` exactly.
pub fn exact_recovery_bench(config: &BenchConfig) -> Result<BenchReport, HarnessError> {
    if config.trials == 0 {
        return Err(HarnessError::InvalidArgument("trials must be at least 1".into()));
    }
    if config.d == 0 || config.methods.is_empty() {
        return Err(HarnessError::InvalidArgument("need d ≥ 1 and at least one method".into()));
    }
    config.recovery.validate()?;
    let target = snap_to_rational(&super::synthetic::paper_target(config.d), config.recovery.max_denominator)
        .map_err(|e| HarnessError::InvalidArgument(e.to_string()))?;

    let mut rows = Vec::new();
    let mut wall = Vec::new();
    for (g, (eta, m)) in config.grid.points().into_iter().enumerate() {
        let start = Instant::now();
        let grid_seed = derive_seed(config.seed, g as u64);
        // (success, errored) per trial per method; rayon preserves order.
        let outcomes: Vec<Vec<(bool, bool)>> = (0..config.trials)
            .into_par_iter()
            .map(|t| {
                let spec = SyntheticSpec::standard(config.d, m, derive_seed(grid_seed, t as u64));
                let Ok((data, _)) = synthetic_instance(&spec, eta) else {
                    return vec![(false, true); config.methods.len()];
                };
                config
                    .methods
                    .iter()
                    .map(|&method| match fit_method(method, &data, &config.recovery) {
                        Ok(w) => match snap_to_rational(&w, config.recovery.max_denominator) {
                            Ok(s) => (s.same_values(&target), false),
                            Err(_) => (false, true),
                        },
                        Err(_) => (false, true),
                    })
                    .collect()
            })
            .collect();
        for (k, method) in config.methods.iter().enumerate() {
            let successes = outcomes.iter().filter(|o| o[k].0).count();
            let errors = outcomes.iter().filter(|o| o[k].1).count();
            let n = config.trials as f64;
            let rate = successes as f64 / n;
            let stderr = (rate * (1.0 - rate) / n).sqrt();
            rows.push(BenchRow {
                method: method.name(),
                eta,
                m,
                trials: config.trials,
                successes,
                errors,
                recovery_rate: rate,
                error_bar: 2.0 * stderr,
            });
        }
        wall.push(start.elapsed().as_secs_f64());
    }
    Ok(BenchReport { config: config.clone(), rows, wall_time_secs: wall })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(grid: BenchGrid) -> BenchConfig {
        BenchConfig {
            d: 3,
            methods: Method::standard_set(),
            grid,
            trials: 6,
            seed: 17,
            recovery: RecoveryConfig::default(),
        }
    }

    #[test]
    fn noiseless_grid_point_is_perfect() {
        let report = exact_recovery_bench(&small(BenchGrid::Noise { etas: vec![0.0], m: 40 })).unwrap();
        for row in &report.rows {
            assert_eq!(row.recovery_rate, 1.0, "{}", row.method);
            assert_eq!(row.error_bar, 0.0);
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = small(BenchGrid::Samples { ms: vec![30, 60], eta: 0.25 });
        let a = exact_recovery_bench(&cfg).unwrap();
        let b = exact_recovery_bench(&cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.rows.len(), 8);
        assert!(a.rows.iter().all(|r| (0.0..=1.0).contains(&r.recovery_rate)));
    }

    #[test]
    fn zero_trials_rejected() {
        let mut cfg = small(BenchGrid::Noise { etas: vec![0.0], m: 10 });
        cfg.trials = 0;
        assert!(exact_recovery_bench(&cfg).is_err());
    }
}
