//! Labeled regression samples.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("row {row} has {found} covariates, expected {expected}")]
    DimensionMismatch { row: usize, expected: usize, found: usize },
    #[error("{covariates} covariate rows but {labels} labels")]
    LengthMismatch { covariates: usize, labels: usize },
    #[error("dataset has dimension 0")]
    ZeroDimension,
}

/// Covariates `x_i ∈ R^d` with labels `y_i`, plus the corruption mask when
/// the data was corrupted synthetically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    dim: usize,
    covariates: Vec<Vec<f64>>,
    labels: Vec<f64>,
    corrupted: Option<Vec<bool>>,
}

impl LabeledDataset {
    pub fn new(covariates: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self, DatasetError> {
        let dim = covariates.first().map_or(0, Vec::len);
        Self::with_dim(dim, covariates, labels)
    }

    /// Like [`new`](Self::new) but fixes the dimension, so empty datasets are allowed.
    pub fn with_dim(dim: usize, covariates: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self, DatasetError> {
        if dim == 0 {
            return Err(DatasetError::ZeroDimension);
        }
        if covariates.len() != labels.len() {
            return Err(DatasetError::LengthMismatch { covariates: covariates.len(), labels: labels.len() });
        }
        if let Some((row, x)) = covariates.iter().enumerate().find(|(_, x)| x.len() != dim) {
            return Err(DatasetError::DimensionMismatch { row, expected: dim, found: x.len() });
        }
        Ok(Self { dim, covariates, labels, corrupted: None })
    }

    /// Labels `y_i = f(w·x_i)` for a link function `f`.
    pub fn realizable(covariates: Vec<Vec<f64>>, w: &[f64], link: impl Fn(f64) -> f64) -> Result<Self, DatasetError> {
        let labels = covariates.iter().map(|x| link(crate::linalg::dot(w, x))).collect();
        Self::new(covariates, labels)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn covariates(&self) -> &[Vec<f64>] {
        &self.covariates
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn x(&self, i: usize) -> &[f64] {
        &self.covariates[i]
    }

    pub fn y(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.covariates.iter().map(Vec::as_slice).zip(self.labels.iter().copied())
    }

    /// Ground-truth corruption mask, if known.
    pub fn corrupted_mask(&self) -> Option<&[bool]> {
        self.corrupted.as_deref()
    }

    pub(crate) fn with_labels(&self, labels: Vec<f64>, corrupted: Option<Vec<bool>>) -> Self {
        debug_assert_eq!(labels.len(), self.len());
        Self { dim: self.dim, covariates: self.covariates.clone(), labels, corrupted }
    }

    /// Subset by indices, dropping the mask's unselected entries too.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            dim: self.dim,
            covariates: indices.iter().map(|&i| self.covariates[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            corrupted: self.corrupted.as_ref().map(|m| indices.iter().map(|&i| m[i]).collect()),
        }
    }
}

/// Exact-fit test used throughout: `|y - ŷ| ≤ fit_tol · (1 + |y|)`.
#[inline]
pub fn fits(y: f64, prediction: f64, fit_tol: f64) -> bool {
    (y - prediction).abs() <= fit_tol * (1.0 + y.abs())
}

/// Default relative band for "y_i = f(w·x_i)".
pub const DEFAULT_FIT_TOL: f64 = 1e-7;
