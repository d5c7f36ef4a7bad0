//! Train/test pipeline shaped like the drug-discovery experiment, on a
//! synthetic stand-in: heterogeneous-scale covariates, integer target,
//! training labels multiplied by −100 with probability η.

use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, LogNormal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::linear::RecoveryConfig;
use crate::noise::{corrupt_massart, CorruptionStrategy, MassartSpec};
use crate::rng::{derive_seed, seeded};

use super::methods::{fit_method, Method};
use super::{margin_fraction, HarnessError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrugPipelineConfig {
    pub train: usize,
    pub test: usize,
    pub d: usize,
    pub eta: f64,
    pub corruption_factor: f64,
    pub margin: f64,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub recovery: RecoveryConfig,
}

impl DrugPipelineConfig {
    /// 3084 training and 1000 test points in 410 dimensions.
    pub fn full_shape(eta: f64, seed: u64) -> Self {
        Self::scaled(3084, 1000, 410, eta, seed)
    }

    pub fn scaled(train: usize, test: usize, d: usize, eta: f64, seed: u64) -> Self {
        Self {
            train,
            test,
            d,
            eta,
            corruption_factor: -100.0,
            margin: 2.0,
            methods: vec![
                Method::RescaledL1,
                Method::NaiveL1,
                Method::NormalizedL1,
                Method::LeastSquares,
                Method::Ridge { lambda: 1.0 },
            ],
            seed,
            recovery: RecoveryConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodScore {
    pub method: String,
    /// `None` when the fit failed; see `error`.
    pub margin_fraction: Option<f64>,
    pub error: Option<String>,
    pub fit_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrugPipelineReport {
    pub train: usize,
    pub test: usize,
    pub d: usize,
    pub eta: f64,
    pub corrupted_train: usize,
    pub scores: Vec<MethodScore>,
}

/// Stand-in covariates: per-column log-normal scales, Gaussian entries.
fn stand_in(train: usize, test: usize, d: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = seeded(seed);
    let scales: Vec<f64> = {
        let ln = LogNormal::new(0.0, 0.5).expect("valid");
        (0..d).map(|_| ln.sample(&mut rng)).collect()
    };
    let w: Vec<f64> = (0..d).map(|_| rng.random_range(-2i32..=2) as f64).collect();
    let mut draw = |n: usize| -> Vec<Vec<f64>> {
        (0..n).map(|_| scales.iter().map(|s| s * rng.sample::<f64, _>(StandardNormal)).collect()).collect()
    };
    let tr = draw(train);
    let te = draw(test);
    (tr, te, w)
}

/// Builds train/test sets, corrupts training labels only, fits each method
/// and scores it by [`margin_fraction`] on the clean test set.
pub fn drug_style_pipeline(cfg: &DrugPipelineConfig) -> Result<DrugPipelineReport, HarnessError> {
    if cfg.train == 0 || cfg.test == 0 || cfg.d == 0 {
        return Err(HarnessError::InvalidArgument("train, test and d must be positive".into()));
    }
    let (tr, te, w) = stand_in(cfg.train, cfg.test, cfg.d, cfg.seed);
    let clean_train = LabeledDataset::realizable(tr, &w, |t| t)?;
    let test = LabeledDataset::realizable(te, &w, |t| t)?;
    let spec = MassartSpec::new(
        cfg.eta,
        CorruptionStrategy::Scale { factor: cfg.corruption_factor },
        derive_seed(cfg.seed, 1),
    )?;
    let (train, record) = corrupt_massart(&clean_train, &spec)?;

    let scores = cfg
        .methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let fit = fit_method(method, &train, &cfg.recovery);
            let fit_secs = start.elapsed().as_secs_f64();
            Ok(match fit {
                Ok(w_hat) => MethodScore {
                    method: method.name(),
                    margin_fraction: Some(margin_fraction(&w_hat, &test, cfg.margin)?),
                    error: None,
                    fit_secs,
                },
                Err(e) => {
                    MethodScore { method: method.name(), margin_fraction: None, error: Some(e.to_string()), fit_secs }
                }
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(DrugPipelineReport {
        train: cfg.train,
        test: cfg.test,
        d: cfg.d,
        eta: cfg.eta,
        corrupted_train: record.corrupted_count(),
        scores,
    })
}
