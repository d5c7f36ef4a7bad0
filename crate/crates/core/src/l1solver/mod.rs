//! ℓ1 regression by linear programming, plus the ℓ0 oracle, rational
//! snapping, and a sampled checker for the structural condition under
//! which the two minimizers coincide.

mod l0;
mod lp;
mod rational;
mod structural;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use l0::{l0_fit_bruteforce, l0_fit_bruteforce_with, L0Fit};
pub use lp::{l1_fit_linear, l1_fit_linear_with, L1FitResult, SimplexOptions};
pub use rational::{snap_scalar, snap_to_rational, RationalVector, DEFAULT_MAX_DENOMINATOR};
pub use structural::{check_structural_condition, structural_margin, StructuralCheck};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum L1Error {
    #[error("simplex exceeded its pivot cap after {pivots} pivots")]
    SolverStalled { pivots: usize },
    #[error("every candidate subset is singular")]
    Degenerate,
    #[error("empty sample set")]
    Empty,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("max_denominator must be at least 1")]
    InvalidDenominator,
    #[error("numerical failure: {0}")]
    Numerical(&'static str),
}

/// Link function of the regression model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Linear,
    Relu,
}

impl Model {
    #[inline]
    pub fn link(self, t: f64) -> f64 {
        match self {
            Model::Linear => t,
            Model::Relu => t.max(0.0),
        }
    }

    pub fn predict(self, w: &[f64], x: &[f64]) -> f64 {
        self.link(crate::linalg::dot(w, x))
    }
}
