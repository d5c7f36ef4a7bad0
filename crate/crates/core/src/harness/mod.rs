//! Synthetic data, baselines, metrics, CSV ingestion, and the trial harness.

mod bench;
mod drug;
mod io;
mod methods;
mod synthetic;

use thiserror::Error;

pub use bench::{exact_recovery_bench, BenchConfig, BenchGrid, BenchReport, BenchRow};
pub use drug::{drug_style_pipeline, DrugPipelineConfig, DrugPipelineReport, MethodScore};
pub use io::{load_dataset_csv, read_dataset_csv, write_dataset_csv, write_dataset_csv_to};
pub use methods::{fit_method, least_squares, Method};
pub use synthetic::{paper_target, sample_synthetic_mixture, synthetic_instance, SyntheticSpec};

use crate::dataset::LabeledDataset;
use crate::linalg::dot;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("malformed CSV at row {row}, column {col}: {reason}")]
    MalformedCsv { row: usize, col: usize, reason: String },
    #[error("row {row} has {found} fields, expected {expected}")]
    DimensionMismatch { row: usize, expected: usize, found: usize },
    #[error("empty test set")]
    EmptyTestSet,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Noise(#[from] crate::noise::NoiseError),
    #[error(transparent)]
    Recovery(#[from] crate::linear::RecoveryError),
    #[error(transparent)]
    Dataset(#[from] crate::dataset::DatasetError),
}

/// Fraction of `testset` with `|w·x − y| ≤ margin`.
pub fn margin_fraction(w: &[f64], testset: &LabeledDataset, margin: f64) -> Result<f64, HarnessError> {
    if testset.is_empty() {
        return Err(HarnessError::EmptyTestSet);
    }
    if !(margin >= 0.0) {
        return Err(HarnessError::InvalidArgument(format!("margin must be nonnegative, got {margin}")));
    }
    let hits = testset.iter().filter(|(x, y)| (dot(w, x) - y).abs() <= margin).count();
    Ok(hits as f64 / testset.len() as f64)
}
