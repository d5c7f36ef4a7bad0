use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::l1solver::{l1_fit_linear_with, SimplexOptions};
use crate::linalg::{norm, solve, Matrix};
use crate::linear::{recover_linear, RecoveryConfig, RecoveryError};

/// Estimators compared by the harness.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum Method {
    /// Radial-isotropic rescaling followed by ℓ1, with subspace recursion.
    RescaledL1,
    NaiveL1,
    /// ℓ1 on `(x/‖x‖, y/‖x‖)`.
    NormalizedL1,
    LeastSquares,
    Ridge {
        lambda: f64,
    },
}

impl Method {
    pub fn name(&self) -> String {
        match self {
            Method::RescaledL1 => "rescaled_l1".into(),
            Method::NaiveL1 => "naive_l1".into(),
            Method::NormalizedL1 => "normalized_l1".into(),
            Method::LeastSquares => "least_squares".into(),
            Method::Ridge { lambda } => format!("ridge({lambda})"),
        }
    }

    pub fn standard_set() -> Vec<Method> {
        vec![Method::RescaledL1, Method::NaiveL1, Method::NormalizedL1, Method::LeastSquares]
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    /// Accepts `rescaled_l1`, `naive_l1`, `normalized_l1`, `least_squares`, `ridge:<lambda>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().replace('-', "_");
        match s.as_str() {
            "rescaled_l1" | "rescaled" => Ok(Method::RescaledL1),
            "naive_l1" | "naive" => Ok(Method::NaiveL1),
            "normalized_l1" | "normalized" => Ok(Method::NormalizedL1),
            "least_squares" | "ls" => Ok(Method::LeastSquares),
            other => match other.strip_prefix("ridge:") {
                Some(l) => l.parse::<f64>().map(|lambda| Method::Ridge { lambda }).map_err(|e| e.to_string()),
                None => Err(format!("unknown method `{other}`")),
            },
        }
    }
}

/// Unsnapped estimate of `w` under `method`.
pub fn fit_method(method: Method, data: &LabeledDataset, cfg: &RecoveryConfig) -> Result<Vec<f64>, RecoveryError> {
    let opts = SimplexOptions { max_pivots: cfg.max_pivots, fit_tol: cfg.fit_tol };
    match method {
        Method::RescaledL1 => Ok(recover_linear(data, cfg)?.w_hat),
        Method::NaiveL1 => Ok(l1_fit_linear_with(data, &opts)?.w),
        Method::NormalizedL1 => {
            let (xs, ys): (Vec<Vec<f64>>, Vec<f64>) = data
                .iter()
                .filter_map(|(x, y)| {
                    let n = norm(x);
                    (n > 0.0).then(|| (x.iter().map(|v| v / n).collect(), y / n))
                })
                .unzip();
            let scaled = LabeledDataset::with_dim(data.dim(), xs, ys).expect("same dimension");
            Ok(l1_fit_linear_with(&scaled, &opts)?.w)
        }
        Method::LeastSquares => least_squares(data, 0.0),
        Method::Ridge { lambda } => least_squares(data, lambda),
    }
}

/// Solves `(XᵀX + λI) w = Xᵀy`.
pub fn least_squares(data: &LabeledDataset, lambda: f64) -> Result<Vec<f64>, RecoveryError> {
    let d = data.dim();
    let mut gram = Matrix::zeros(d, d);
    let mut rhs = vec![0.0; d];
    for (x, y) in data.iter() {
        for i in 0..d {
            rhs[i] += x[i] * y;
            for j in 0..d {
                gram[(i, j)] += x[i] * x[j];
            }
        }
    }
    for i in 0..d {
        gram[(i, i)] += lambda;
    }
    solve(&gram, &rhs, 1e-12).ok_or(RecoveryError::NonIdentifiable { level: 0, rank: d.saturating_sub(1), dim: d })
}
