//! Exact recovery of a linear parameter from Massart-corrupted labels.
//!
//! Put the covariates in radial-isotropic position, rescale every sample by
//! `1/‖A x‖`, and take the ℓ1 fit in those coordinates. When a heavy
//! subspace blocks the transform, recover the parameter's component on it
//! first, then deflate and recover the orthogonal remainder.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{fits, LabeledDataset, DEFAULT_FIT_TOL};
use crate::isotropy::{radial_isotropize_with, Isotropy, IsotropyConfig, IsotropyError, TransformDiagnostics};
use crate::l1solver::{
    l1_fit_linear_with, snap_to_rational, L1Error, RationalVector, SimplexOptions, DEFAULT_MAX_DENOMINATOR,
};
use crate::linalg::{dot, norm, orthonormal_complement, orthonormalize, LinalgError, OrthonormalBasis};
use crate::rng::derive_seed;

/// Relative distance below which a covariate counts as lying in a subspace.
pub const SUBSPACE_MEMBER_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecoveryError {
    #[error("covariates span only {rank} of {dim} dimensions at level {level}; the parameter is not identifiable")]
    NonIdentifiable { level: usize, rank: usize, dim: usize },
    #[error("level {level} has {points} nonzero points in dimension {dim}")]
    InsufficientPoints { level: usize, points: usize, dim: usize },
    #[error("a {dim}-dimensional heavy subspace holds {fraction:.3} of the points; use recover_linear")]
    HeavySubspace { dim: usize, fraction: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Isotropy(#[from] IsotropyError),
    #[error(transparent)]
    Solver(#[from] L1Error),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryConfig {
    /// Isotropy target; the transform must reach `λmin ≥ 1 − γ`.
    pub gamma: f64,
    pub fit_tol: f64,
    /// Bound on denominators when snapping the estimate.
    pub max_denominator: u64,
    /// Anti-concentration parameter of the covariates, if known. Only used
    /// to size samples in the harness.
    pub rho_hint: Option<f64>,
    pub seed: u64,
    pub max_pivots: Option<usize>,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            fit_tol: DEFAULT_FIT_TOL,
            max_denominator: DEFAULT_MAX_DENOMINATOR,
            rho_hint: None,
            seed: 0,
            max_pivots: None,
        }
    }
}

impl RecoveryConfig {
    pub fn validate(&self) -> Result<(), RecoveryError> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(RecoveryError::InvalidConfig(format!("gamma must lie in (0, 1), got {}", self.gamma)));
        }
        if self.max_denominator == 0 {
            return Err(RecoveryError::InvalidConfig("max_denominator must be at least 1".into()));
        }
        if !(self.fit_tol >= 0.0) {
            return Err(RecoveryError::InvalidConfig(format!("fit_tol must be nonnegative, got {}", self.fit_tol)));
        }
        Ok(())
    }

    fn isotropy(&self) -> IsotropyConfig {
        IsotropyConfig::with_gamma(self.gamma)
    }

    fn simplex(&self) -> SimplexOptions {
        SimplexOptions { max_pivots: self.max_pivots, fit_tol: self.fit_tol }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Root,
    Subspace,
    Complement,
}

/// One node of the recursion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceLevel {
    pub depth: usize,
    pub branch: Branch,
    pub dim: usize,
    pub points: usize,
    pub zero_points: usize,
    /// Dimension of the heavy subspace found here, if any.
    pub heavy_dim: Option<usize>,
    pub in_subspace: usize,
    pub outside: usize,
    pub isotropy: Option<TransformDiagnostics>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub w_hat: Vec<f64>,
    pub w_snapped: RationalVector,
    /// Fraction of all samples fit by `w_snapped` within `fit_tol`.
    pub inlier_fraction: f64,
    /// `inlier_fraction ≥ 1/2`. A false value means the noise premise failed.
    pub certified: bool,
    pub recursion_trace: Vec<TraceLevel>,
    pub attempts: usize,
}

impl RecoveryReport {
    /// Number of heavy-subspace splits performed.
    pub fn splits(&self) -> usize {
        self.recursion_trace.iter().filter(|l| l.heavy_dim.is_some()).count()
    }

    pub fn max_depth(&self) -> usize {
        self.recursion_trace.iter().map(|l| l.depth).max().unwrap_or(0)
    }

    /// Recomputes the fraction of `samples` fit by the snapped parameter.
    pub fn recompute_inlier_fraction(&self, samples: &LabeledDataset, fit_tol: f64) -> f64 {
        inlier_fraction(samples, &self.w_snapped.to_f64(), fit_tol)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn inlier_fraction(samples: &LabeledDataset, w: &[f64], fit_tol: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let hits = samples.iter().filter(|(x, y)| fits(*y, dot(w, x), fit_tol)).count();
    hits as f64 / samples.len() as f64
}

pub(crate) fn finish_report(
    samples: &LabeledDataset,
    w_hat: Vec<f64>,
    trace: Vec<TraceLevel>,
    fit_tol: f64,
    max_denominator: u64,
    fit: impl Fn(&[f64], &[f64]) -> f64,
) -> Result<RecoveryReport, RecoveryError> {
    let w_snapped = snap_to_rational(&w_hat, max_denominator)?;
    let ws = w_snapped.to_f64();
    let inlier_fraction = if samples.is_empty() {
        0.0
    } else {
        samples.iter().filter(|(x, y)| fits(*y, fit(&ws, x), fit_tol)).count() as f64 / samples.len() as f64
    };
    Ok(RecoveryReport {
        w_hat,
        w_snapped,
        inlier_fraction,
        certified: inlier_fraction >= 0.5,
        recursion_trace: trace,
        attempts: 1,
    })
}

fn is_zero(x: &[f64]) -> bool {
    x.iter().all(|&v| v == 0.0)
}

/// ℓ1 fit after the radial rescaling `(A x/‖A x‖, y/‖A x‖)`, mapped back by `A`.
fn rescaled_l1<R: AsRef<[f64]>>(
    xs: &[R],
    ys: &[f64],
    dim: usize,
    transform: &crate::isotropy::RadialTransform,
    cfg: &RecoveryConfig,
) -> Result<Vec<f64>, RecoveryError> {
    let mut tx = Vec::with_capacity(xs.len());
    let mut ty = Vec::with_capacity(xs.len());
    for (x, &y) in xs.iter().zip(ys) {
        let (u, n) = transform.apply(x.as_ref());
        tx.push(u);
        ty.push(y / n);
    }
    let data = LabeledDataset::with_dim(dim, tx, ty).map_err(|_| RecoveryError::InvalidConfig("dimension".into()))?;
    let fit = l1_fit_linear_with(&data, &cfg.simplex())?;
    Ok(transform.matrix().matvec(&fit.w))
}

/// Single-shot recovery without subspace recursion.
pub fn recover_linear_simple(
    samples: &LabeledDataset,
    config: &RecoveryConfig,
) -> Result<RecoveryReport, RecoveryError> {
    config.validate()?;
    let d = samples.dim();
    let nz: Vec<usize> = (0..samples.len()).filter(|&i| !is_zero(samples.x(i))).collect();
    if nz.len() < d {
        return Err(RecoveryError::InsufficientPoints { level: 0, points: nz.len(), dim: d });
    }
    let xs: Vec<&[f64]> = nz.iter().map(|&i| samples.x(i)).collect();
    let ys: Vec<f64> = nz.iter().map(|&i| samples.y(i)).collect();
    let transform = match radial_isotropize_with(&xs, d, &config.isotropy())? {
        Isotropy::Transform(t) => t,
        Isotropy::Heavy(h) => return Err(RecoveryError::HeavySubspace { dim: h.dim(), fraction: h.fraction }),
    };
    let w_hat = rescaled_l1(&xs, &ys, d, &transform, config)?;
    let trace = vec![TraceLevel {
        depth: 0,
        branch: Branch::Root,
        dim: d,
        points: samples.len(),
        zero_points: samples.len() - nz.len(),
        heavy_dim: None,
        in_subspace: 0,
        outside: nz.len(),
        isotropy: Some(transform.diagnostics()),
    }];
    finish_report(samples, w_hat, trace, config.fit_tol, config.max_denominator, dot)
}

/// Recovery with heavy-subspace recursion. Requires the nonzero covariates
/// to span the ambient space.
pub fn recover_linear(samples: &LabeledDataset, config: &RecoveryConfig) -> Result<RecoveryReport, RecoveryError> {
    config.validate()?;
    let mut trace = Vec::new();
    let w_hat =
        recover_level(samples.covariates(), samples.labels(), samples.dim(), 0, Branch::Root, config, &mut trace)?;
    finish_report(samples, w_hat, trace, config.fit_tol, config.max_denominator, dot)
}

fn recover_level(
    xs: &[Vec<f64>],
    ys: &[f64],
    dim: usize,
    depth: usize,
    branch: Branch,
    cfg: &RecoveryConfig,
    trace: &mut Vec<TraceLevel>,
) -> Result<Vec<f64>, RecoveryError> {
    let nz: Vec<usize> = (0..xs.len()).filter(|&i| !is_zero(&xs[i])).collect();
    let nz_x: Vec<&[f64]> = nz.iter().map(|&i| xs[i].as_slice()).collect();
    let rank = orthonormalize(dim, &nz_x.iter().map(|x| x.to_vec()).collect::<Vec<_>>(), 1e-9).dim();
    if rank < dim {
        if nz.len() < dim {
            return Err(RecoveryError::InsufficientPoints { level: depth, points: nz.len(), dim });
        }
        return Err(RecoveryError::NonIdentifiable { level: depth, rank, dim });
    }
    let nz_y: Vec<f64> = nz.iter().map(|&i| ys[i]).collect();
    let mut node = TraceLevel {
        depth,
        branch,
        dim,
        points: xs.len(),
        zero_points: xs.len() - nz.len(),
        heavy_dim: None,
        in_subspace: 0,
        outside: nz.len(),
        isotropy: None,
    };

    match radial_isotropize_with(&nz_x, dim, &cfg.isotropy())? {
        Isotropy::Transform(t) => {
            node.isotropy = Some(t.diagnostics());
            trace.push(node);
            rescaled_l1(&nz_x, &nz_y, dim, &t, cfg)
        }
        Isotropy::Heavy(heavy) => {
            let basis = heavy.basis;
            let mut inside = vec![false; nz.len()];
            for (j, x) in nz_x.iter().enumerate() {
                inside[j] = basis.distance(x) <= SUBSPACE_MEMBER_TOL * norm(x);
            }
            let in_count = inside.iter().filter(|&&b| b).count();
            node.heavy_dim = Some(basis.dim());
            node.in_subspace = in_count;
            node.outside = nz.len() - in_count;
            trace.push(node);

            let (sub_x, sub_y): (Vec<Vec<f64>>, Vec<f64>) =
                (0..nz.len()).filter(|&j| inside[j]).map(|j| (basis.coords(nz_x[j]), nz_y[j])).unzip();
            let w_sub = recover_level(&sub_x, &sub_y, basis.dim(), depth + 1, Branch::Subspace, cfg, trace)?;
            let w_v = basis.lift(&w_sub);

            let comp: OrthonormalBasis = orthonormal_complement(&basis)?;
            let (out_x, out_y): (Vec<Vec<f64>>, Vec<f64>) = (0..nz.len())
                .filter(|&j| !inside[j])
                .map(|j| (comp.coords(nz_x[j]), nz_y[j] - dot(&w_v, nz_x[j])))
                .unzip();
            let w_c = recover_level(&out_x, &out_y, comp.dim(), depth + 1, Branch::Complement, cfg, trace)?;
            let w_perp = comp.lift(&w_c);
            Ok(w_v.iter().zip(&w_perp).map(|(a, b)| a + b).collect())
        }
    }
}

/// Reruns `recover_linear` on fresh samples until a run is certified, at
/// most `attempts` times. `draw(seed)` produces the sample set for a run.
pub fn recover_linear_with_retries(
    mut draw: impl FnMut(u64) -> LabeledDataset,
    config: &RecoveryConfig,
    attempts: usize,
) -> Result<RecoveryReport, RecoveryError> {
    let mut last = None;
    for attempt in 0..attempts.max(1) {
        let data = draw(derive_seed(config.seed, attempt as u64));
        match recover_linear(&data, config) {
            Ok(mut report) => {
                report.attempts = attempt + 1;
                if report.certified {
                    return Ok(report);
                }
                last = Some(Ok(report));
            }
            Err(e) => last = Some(Err(e)),
        }
    }
    last.expect("at least one attempt")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::l1solver::{l1_fit_linear, snap_to_rational};
    use crate::linalg::Matrix;
    use crate::rng::seeded;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn gaussian(rng: &mut crate::rng::Rng, m: usize, d: usize) -> Vec<Vec<f64>> {
        (0..m).map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect()).collect()
    }

    #[test]
    fn noiseless_recovery_up_to_d10() {
        for d in [1, 2, 5, 10] {
            let mut rng = seeded(d as u64);
            let w: Vec<f64> = (0..d).map(|i| i as f64 - 3.0).collect();
            let data = LabeledDataset::realizable(gaussian(&mut rng, 4 * d + 5, d), &w, |t| t).unwrap();
            let report = recover_linear(&data, &RecoveryConfig::default()).unwrap();
            let ints: Vec<i64> = w.iter().map(|&v| v as i64).collect();
            assert!(report.w_snapped.equals_integers(&ints), "d={d}: {}", report.w_snapped);
            assert_eq!(report.inlier_fraction, 1.0);
            assert!(report.certified);
        }
    }

    #[test]
    fn far_outlier_breaks_naive_fit_only() {
        let mut rng = seeded(5);
        let w_star = [1.0, 2.0];
        let mut xs: Vec<Vec<f64>> =
            (0..49).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
        xs.push(vec![100.0, 0.0]);
        let mut data = LabeledDataset::realizable(xs, &w_star, |t| t).unwrap();
        let mut ys = data.labels().to_vec();
        ys[49] = -500.0;
        data = LabeledDataset::new(data.covariates().to_vec(), ys).unwrap();

        let naive = snap_to_rational(&l1_fit_linear(&data).unwrap().w, DEFAULT_MAX_DENOMINATOR).unwrap();
        assert!(!naive.equals_integers(&[1, 2]), "naive fit unexpectedly exact: {naive}");
        let report = recover_linear_simple(&data, &RecoveryConfig::default()).unwrap();
        assert!(report.w_snapped.equals_integers(&[1, 2]), "{}", report.w_snapped);
    }

    fn planted_line(seed: u64, m: usize, eta: f64) -> LabeledDataset {
        let mut rng = seeded(seed);
        let w = [3.0, -2.0];
        let mut xs = Vec::with_capacity(m);
        for i in 0..m {
            if i * 10 < m * 6 {
                xs.push(vec![rng.sample::<f64, _>(StandardNormal), 0.0]);
            } else {
                xs.push(vec![rng.sample(StandardNormal), rng.sample(StandardNormal)]);
            }
        }
        let ys = xs
            .iter()
            .map(|x| {
                let clean = dot(&w, x);
                if rng.random::<f64>() < eta {
                    -clean + 1.0
                } else {
                    clean
                }
            })
            .collect();
        LabeledDataset::new(xs, ys).unwrap()
    }

    #[test]
    fn planted_heavy_line_takes_one_split() {
        let data = planted_line(7, 300, 0.2);
        let report = recover_linear(&data, &RecoveryConfig::default()).unwrap();
        assert!(report.w_snapped.equals_integers(&[3, -2]), "{}", report.w_snapped);
        assert_eq!(report.splits(), 1);
        assert_eq!(report.max_depth(), 1);
        let root = &report.recursion_trace[0];
        assert_eq!(root.heavy_dim, Some(1));
        assert_eq!(root.in_subspace + root.outside + root.zero_points, root.points);
        assert!(matches!(
            recover_linear_simple(&data, &RecoveryConfig::default()),
            Err(RecoveryError::HeavySubspace { .. })
        ));
    }

    #[test]
    fn no_heavy_subspace_matches_simple() {
        let mut rng = seeded(8);
        let data = LabeledDataset::realizable(gaussian(&mut rng, 40, 3), &[1.0, 0.5, -2.0], |t| t).unwrap();
        let a = recover_linear(&data, &RecoveryConfig::default()).unwrap();
        let b = recover_linear_simple(&data, &RecoveryConfig::default()).unwrap();
        assert_eq!(a.w_snapped, b.w_snapped);
        assert_eq!(a.splits(), 0);
    }

    #[test]
    fn collinear_covariates_are_not_identifiable() {
        let xs: Vec<Vec<f64>> = (1..10).map(|i| vec![i as f64, 0.0]).collect();
        let data = LabeledDataset::realizable(xs, &[1.0, 1.0], |t| t).unwrap();
        assert!(matches!(
            recover_linear(&data, &RecoveryConfig::default()),
            Err(RecoveryError::NonIdentifiable { rank: 1, .. })
        ));
    }

    #[test]
    fn zero_covariates_count_but_are_skipped() {
        let mut rng = seeded(9);
        let mut xs = gaussian(&mut rng, 20, 2);
        xs.push(vec![0.0, 0.0]);
        let data = LabeledDataset::realizable(xs, &[2.0, 1.0], |t| t).unwrap();
        let report = recover_linear(&data, &RecoveryConfig::default()).unwrap();
        assert_eq!(report.recursion_trace[0].zero_points, 1);
        assert_eq!(report.inlier_fraction, 1.0);
    }

    #[test]
    fn inlier_fraction_recomputes_exactly() {
        let data = planted_line(3, 200, 0.2);
        let report = recover_linear(&data, &RecoveryConfig::default()).unwrap();
        assert_eq!(report.recompute_inlier_fraction(&data, DEFAULT_FIT_TOL), report.inlier_fraction);
        let json = report.to_json();
        let back: RecoveryReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    fn corrupted_gaussian(seed: u64, m: usize, w: &[f64], eta: f64) -> LabeledDataset {
        let mut rng = seeded(seed);
        let xs = gaussian(&mut rng, m, w.len());
        let ys = xs.iter().map(|x| if rng.random::<f64>() < eta { 7.0 } else { dot(w, x) }).collect();
        LabeledDataset::new(xs, ys).unwrap()
    }

    #[test]
    fn equivariant_under_diagonal_and_rotation() {
        let w = [2.0, -1.0, 3.0];
        let data = corrupted_gaussian(21, 80, &w, 0.2);
        let base = recover_linear(&data, &RecoveryConfig::default()).unwrap();
        assert!(base.w_snapped.equals_integers(&[2, -1, 3]));
        // Pythagorean rotation keeps T^{-T} w rational.
        let rot = Matrix::from_rows(&[vec![0.6, -0.8, 0.0], vec![0.8, 0.6, 0.0], vec![0.0, 0.0, 1.0]]);
        let diag = Matrix::from_diag(&[2.0, 0.5, 4.0]);
        let diag_inv_t = Matrix::from_diag(&[0.5, 2.0, 0.25]);
        for (t, t_inv_t) in [(rot.clone(), rot), (diag, diag_inv_t)] {
            let xs: Vec<Vec<f64>> = data.covariates().iter().map(|x| t.matvec(x)).collect();
            let mapped = LabeledDataset::new(xs, data.labels().to_vec()).unwrap();
            let report = recover_linear(&mapped, &RecoveryConfig::default()).unwrap();
            let expected =
                snap_to_rational(&t_inv_t.matvec(&base.w_snapped.to_f64()), DEFAULT_MAX_DENOMINATOR).unwrap();
            assert_eq!(report.w_snapped, expected);
        }
    }

    #[test]
    fn retries_stop_at_first_certified_run() {
        let w = [1.0, 1.0];
        let mut calls = 0;
        let report = recover_linear_with_retries(
            |seed| {
                calls += 1;
                let eta = if calls == 1 { 0.9 } else { 0.1 };
                corrupted_gaussian(seed, 60, &w, eta)
            },
            &RecoveryConfig::default(),
            3,
        )
        .unwrap();
        assert!(report.certified);
        assert_eq!(report.attempts, 2);
    }

    #[test]
    fn rejects_bad_config() {
        let data = corrupted_gaussian(1, 10, &[1.0], 0.0);
        let cfg = RecoveryConfig { gamma: 1.5, ..Default::default() };
        assert!(matches!(recover_linear(&data, &cfg), Err(RecoveryError::InvalidConfig(_))));
    }
}
