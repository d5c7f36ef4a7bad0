//! ReLU regression under Massart noise: the separation oracle, the ellipsoid
//! method driven by it, and gradient descent under per-step transforms.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{fits, LabeledDataset, DEFAULT_FIT_TOL};
use crate::isotropy::{
    radial_isotropize_with, HeavySubspace, Isotropy, IsotropyConfig, IsotropyError, RadialTransform,
};
use crate::l1solver::{snap_to_rational, L1Error, Model, DEFAULT_MAX_DENOMINATOR};
use crate::linalg::{
    dot, inv_sqrt_psd, log_det_spd, norm, orthonormal_complement, orthonormalize, second_moment, LinalgError, Matrix,
    OrthonormalBasis, SymPsdMatrix,
};
use crate::linear::{finish_report, RecoveryError, RecoveryReport, SUBSPACE_MEMBER_TOL};

/// Points with `w·x ≥ -BOUNDARY_TOL·‖x‖` count as on the nonnegative side.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReluError {
    #[error("no nonzero sample has w·x ≥ 0; the halfspace mass assumption fails")]
    HalfspaceEmpty,
    #[error("oracle produced a zero normal at a non-fitting query")]
    DegenerateCut,
    #[error("ellipsoid stopped after {steps} steps with radius {radius:e} and no majority fit")]
    NoRecovery { steps: usize, radius: f64, state: Box<EllipsoidState> },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Isotropy(#[from] IsotropyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Solver(#[from] L1Error),
}

impl From<RecoveryError> for ReluError {
    fn from(e: RecoveryError) -> Self {
        match e {
            RecoveryError::Solver(s) => ReluError::Solver(s),
            RecoveryError::Isotropy(i) => ReluError::Isotropy(i),
            RecoveryError::Linalg(l) => ReluError::Linalg(l),
            other => ReluError::InvalidConfig(other.to_string()),
        }
    }
}

/// `(1/m) Σ |y − ReLU(w·x)|` and its subgradient, taking the indicator
/// `1{w·x > 0}` and `sgn(0) = 0` at the kinks.
pub fn relu_l1_loss(samples: &LabeledDataset, w: &[f64]) -> (f64, Vec<f64>) {
    let m = samples.len().max(1) as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; samples.dim()];
    for (x, y) in samples.iter() {
        let t = dot(w, x);
        let pred = t.max(0.0);
        loss += (y - pred).abs();
        if t > 0.0 {
            let s = sgn(pred - y);
            if s != 0.0 {
                for (g, v) in grad.iter_mut().zip(x) {
                    *g += s * v;
                }
            }
        }
    }
    grad.iter_mut().for_each(|g| *g /= m);
    (loss / m, grad)
}

#[inline]
fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub gamma: f64,
    pub fit_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { gamma: 0.5, fit_tol: DEFAULT_FIT_TOL }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SepResult {
    /// The query fits at least half the samples.
    Yes,
    /// Keep `{w : normal·(w − w0) ≤ 0}`.
    Hyperplane { normal: Vec<f64> },
}

/// Where a returned hyperplane came from.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleTrace {
    /// Heavy-subspace splits taken on the way to the cut.
    pub depth: usize,
    /// Transform used for the cut. Only recorded for cuts made at the top level.
    pub transform: Option<RadialTransform>,
    /// Indices of the samples averaged into the cut (top level only).
    pub subset: Vec<usize>,
    /// `log(λmax/λmin)` of the transform that produced the cut.
    pub log_condition_number: f64,
}

pub fn sep_oracle(samples: &LabeledDataset, w0: &[f64], config: &OracleConfig) -> Result<SepResult, ReluError> {
    sep_oracle_traced(samples, w0, config).map(|(r, _)| r)
}

/// Separation oracle with a record of how the cut was produced.
pub fn sep_oracle_traced(
    samples: &LabeledDataset,
    w0: &[f64],
    config: &OracleConfig,
) -> Result<(SepResult, OracleTrace), ReluError> {
    if !(config.gamma > 0.0 && config.gamma < 1.0) {
        return Err(ReluError::InvalidConfig(format!("gamma must lie in (0, 1), got {}", config.gamma)));
    }
    let xs: Vec<&[f64]> = samples.covariates().iter().map(Vec::as_slice).collect();
    let idx: Vec<usize> = (0..samples.len()).collect();
    let mut trace = OracleTrace { depth: 0, transform: None, subset: Vec::new(), log_condition_number: 0.0 };
    let res = oracle_level(&xs, samples.labels(), &idx, samples.dim(), w0, config, 0, true, &mut trace)?;
    Ok((res, trace))
}

#[allow(clippy::too_many_arguments)]
/// Covariates, then labels and original indices, of one side of a split.
type Split = (Vec<Vec<f64>>, (Vec<f64>, Vec<usize>));

#[allow(clippy::too_many_arguments)]
fn oracle_level(
    xs: &[impl AsRef<[f64]>],
    ys: &[f64],
    ids: &[usize],
    dim: usize,
    w0: &[f64],
    cfg: &OracleConfig,
    depth: usize,
    check_yes: bool,
    trace: &mut OracleTrace,
) -> Result<SepResult, ReluError> {
    let m = xs.len();
    let fit = xs.iter().zip(ys).filter(|(x, y)| fits(**y, Model::Relu.predict(w0, x.as_ref()), cfg.fit_tol)).count();
    if check_yes && 2 * fit >= m {
        return Ok(SepResult::Yes);
    }
    let s: Vec<usize> = (0..m)
        .filter(|&i| {
            let x = xs[i].as_ref();
            let n = norm(x);
            n > 0.0 && dot(w0, x) >= -BOUNDARY_TOL * n
        })
        .collect();
    if s.is_empty() {
        return Err(ReluError::HalfspaceEmpty);
    }
    let sx: Vec<&[f64]> = s.iter().map(|&i| xs[i].as_ref()).collect();

    match isotropize_or_span(&sx, dim, cfg.gamma)? {
        Isotropy::Transform(t) => {
            let mut r = vec![0.0; dim];
            for &i in &s {
                let (u, _) = t.apply(xs[i].as_ref());
                let sg = sgn(dot(w0, xs[i].as_ref()) - ys[i]);
                for (a, b) in r.iter_mut().zip(&u) {
                    *a += sg * b;
                }
            }
            r.iter_mut().for_each(|v| *v /= s.len() as f64);
            // A is symmetric positive definite, so A⁻¹r = solve(A, r).
            let g = crate::linalg::solve(t.matrix().matrix(), &r, 1e-300).ok_or(ReluError::DegenerateCut)?;
            if norm(&g) == 0.0 || g.iter().any(|v| !v.is_finite()) {
                return Err(ReluError::DegenerateCut);
            }
            trace.depth = depth;
            trace.log_condition_number = t.log_condition_number;
            if depth == 0 {
                trace.subset = s.iter().map(|&i| ids[i]).collect();
                trace.transform = Some(t);
            }
            Ok(SepResult::Hyperplane { normal: g })
        }
        Isotropy::Heavy(heavy) => {
            let basis = heavy.basis;
            let inside: Vec<bool> = sx.iter().map(|x| basis.distance(x) <= SUBSPACE_MEMBER_TOL * norm(x)).collect();
            let (vx, (vy, vid)): Split =
                (0..s.len()).filter(|&j| inside[j]).map(|j| (basis.coords(sx[j]), (ys[s[j]], ids[s[j]]))).unzip();
            let w_v = basis.coords(w0);
            match oracle_level(&vx, &vy, &vid, basis.dim(), &w_v, cfg, depth + 1, true, trace)? {
                SepResult::Hyperplane { normal } => return Ok(SepResult::Hyperplane { normal: basis.lift(&normal) }),
                SepResult::Yes => {}
            }
            let comp: OrthonormalBasis = orthonormal_complement(&basis)?;
            let proj_w = basis.lift(&w_v);
            let (cx, (cy, cid)): Split = (0..s.len())
                .filter(|&j| !inside[j])
                .map(|j| (comp.coords(sx[j]), (ys[s[j]] - dot(&proj_w, sx[j]), ids[s[j]])))
                .unzip();
            if cx.is_empty() {
                return Ok(SepResult::Yes);
            }
            let w_c = comp.coords(w0);
            match oracle_level(&cx, &cy, &cid, comp.dim(), &w_c, cfg, depth + 1, true, trace)? {
                SepResult::Hyperplane { normal } => Ok(SepResult::Hyperplane { normal: comp.lift(&normal) }),
                SepResult::Yes => Ok(SepResult::Yes),
            }
        }
    }
}

/// Radial isotropy, treating the span of too few (or rank-deficient) points
/// as a heavy subspace.
fn isotropize_or_span(points: &[&[f64]], dim: usize, gamma: f64) -> Result<Isotropy, ReluError> {
    if points.len() < dim {
        let owned: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
        let basis = orthonormalize(dim, &owned, 1e-9);
        return Ok(Isotropy::Heavy(HeavySubspace { basis, fraction: 1.0, members: (0..points.len()).collect() }));
    }
    Ok(radial_isotropize_with(points, dim, &IsotropyConfig::with_gamma(gamma))?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidConfig {
    /// Radius `R` of the starting ball; must bound `‖w*‖`.
    pub initial_radius: f64,
    /// Stop once the ellipsoid's largest semi-axis drops below this. `None` means `1e-9·R`.
    pub delta_min: Option<f64>,
    pub fit_tol: f64,
    pub max_steps: usize,
    pub gamma: f64,
    pub max_denominator: u64,
}

impl Default for EllipsoidConfig {
    fn default() -> Self {
        Self {
            initial_radius: 10.0,
            delta_min: None,
            fit_tol: DEFAULT_FIT_TOL,
            max_steps: 20_000,
            gamma: 0.5,
            max_denominator: DEFAULT_MAX_DENOMINATOR,
        }
    }
}

impl EllipsoidConfig {
    pub fn delta(&self) -> f64 {
        self.delta_min.unwrap_or(1e-9 * self.initial_radius)
    }

    fn validate(&self) -> Result<(), ReluError> {
        if !(self.initial_radius > 0.0) || !(self.delta() > 0.0) {
            return Err(ReluError::InvalidConfig("initial_radius and delta_min must be positive".into()));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) || self.max_denominator == 0 {
            return Err(ReluError::InvalidConfig("gamma must lie in (0, 1) and max_denominator ≥ 1".into()));
        }
        Ok(())
    }
}

/// `{w : (w − c)ᵀ P⁻¹ (w − c) ≤ 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EllipsoidState {
    pub center: Vec<f64>,
    pub shape: SymPsdMatrix,
    /// `½ log det P`, the log-volume up to the unit-ball constant.
    pub volume_log: f64,
}

impl EllipsoidState {
    pub fn ball(dim: usize, radius: f64) -> Self {
        let shape = SymPsdMatrix::from_diag(&vec![radius * radius; dim]);
        Self { center: vec![0.0; dim], shape, volume_log: dim as f64 * radius.ln() }
    }

    /// Largest semi-axis, `sqrt(λmax(P))`.
    pub fn radius(&self) -> f64 {
        self.shape.matrix().sym_spectral_norm().sqrt()
    }

    pub fn contains(&self, w: &[f64]) -> bool {
        let diff: Vec<f64> = w.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        match crate::linalg::solve(self.shape.matrix(), &diff, 1e-300) {
            Some(z) => dot(&diff, &z) <= 1.0 + 1e-12,
            None => false,
        }
    }

    /// Central cut keeping `{w : g·(w − c) ≤ 0}`.
    pub fn cut(&mut self, g: &[f64]) -> Result<(), ReluError> {
        let n = self.center.len();
        let p = self.shape.matrix();
        let pg = p.matvec(g);
        let gpg = dot(g, &pg);
        if !(gpg > 0.0) {
            return Err(ReluError::DegenerateCut);
        }
        let b: Vec<f64> = pg.iter().map(|v| v / gpg.sqrt()).collect();
        if n == 1 {
            self.center[0] -= b[0] / 2.0;
            self.shape = SymPsdMatrix::from_diag(&[p[(0, 0)] / 4.0]);
        } else {
            let nf = n as f64;
            for (c, bi) in self.center.iter_mut().zip(&b) {
                *c -= bi / (nf + 1.0);
            }
            let f = nf * nf / (nf * nf - 1.0);
            let k = 2.0 / (nf + 1.0);
            let mut next = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    next[(i, j)] = f * (p[(i, j)] - k * b[i] * b[j]);
                }
            }
            self.shape = SymPsdMatrix::from_symmetric_unchecked(next);
        }
        self.volume_log = 0.5 * log_det_spd(&self.shape)?;
        Ok(())
    }
}

/// One cut of an instrumented run.
#[derive(Clone, Debug, PartialEq)]
pub struct CutRecord {
    pub center: Vec<f64>,
    pub normal: Vec<f64>,
    pub volume_log_before: f64,
    pub volume_log_after: f64,
    pub log_condition_number: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipsoidRun {
    pub report: RecoveryReport,
    pub steps: usize,
    pub cuts: Vec<CutRecord>,
    pub final_state: EllipsoidState,
}

/// Ellipsoid method over the ball of radius `R`, querying [`sep_oracle`] at
/// each center. On a Yes the center is snapped to rationals and returned if
/// the snapped parameter fits at least half the samples.
pub fn ellipsoid_recover_relu(samples: &LabeledDataset, config: &EllipsoidConfig) -> Result<EllipsoidRun, ReluError> {
    config.validate()?;
    let d = samples.dim();
    let oracle = OracleConfig { gamma: config.gamma, fit_tol: config.fit_tol };
    let mut state = EllipsoidState::ball(d, config.initial_radius);
    let mut cuts = Vec::new();
    for step in 0..config.max_steps {
        if state.radius() < config.delta() {
            return Err(ReluError::NoRecovery { steps: step, radius: state.radius(), state: Box::new(state) });
        }
        let (mut res, mut trace) = sep_oracle_traced(samples, &state.center, &oracle)?;
        if res == SepResult::Yes {
            if let Some(report) = certified_snap(samples, &state.center, config)? {
                return Ok(EllipsoidRun { report, steps: step, cuts, final_state: state });
            }
            // The loose fit band accepted a center that no rational rounding
            // confirms; cut anyway and keep shrinking.
            (res, trace) = forced_cut(samples, &state.center, &oracle)?;
        }
        let SepResult::Hyperplane { normal } = res else {
            return Err(ReluError::DegenerateCut);
        };
        let before = state.volume_log;
        let center = state.center.clone();
        state.cut(&normal)?;
        cuts.push(CutRecord {
            center,
            normal,
            volume_log_before: before,
            volume_log_after: state.volume_log,
            log_condition_number: trace.log_condition_number,
        });
    }
    Err(ReluError::NoRecovery { steps: config.max_steps, radius: state.radius(), state: Box::new(state) })
}

fn forced_cut(samples: &LabeledDataset, w0: &[f64], cfg: &OracleConfig) -> Result<(SepResult, OracleTrace), ReluError> {
    let xs: Vec<&[f64]> = samples.covariates().iter().map(Vec::as_slice).collect();
    let idx: Vec<usize> = (0..samples.len()).collect();
    let mut trace = OracleTrace { depth: 0, transform: None, subset: Vec::new(), log_condition_number: 0.0 };
    let res = oracle_level(&xs, samples.labels(), &idx, samples.dim(), w0, cfg, 0, false, &mut trace)?;
    Ok((res, trace))
}

/// Snaps `center` with denominator bounds `1, 10, …, max_denominator` and
/// keeps the candidate fitting the most samples (smaller bound on ties).
/// Returns it only if it fits at least half.
fn certified_snap(
    samples: &LabeledDataset,
    center: &[f64],
    config: &EllipsoidConfig,
) -> Result<Option<RecoveryReport>, ReluError> {
    let relu = |w: &[f64], x: &[f64]| Model::Relu.predict(w, x);
    let mut best: Option<RecoveryReport> = None;
    let mut bound = 1u64;
    loop {
        let bound_now = bound.min(config.max_denominator);
        let report = finish_report(samples, center.to_vec(), Vec::new(), config.fit_tol, bound_now, relu)?;
        if best.as_ref().is_none_or(|b| report.inlier_fraction > b.inlier_fraction) {
            best = Some(report);
        }
        if bound_now == config.max_denominator {
            break;
        }
        bound = bound.saturating_mul(10);
    }
    Ok(best.filter(|r| r.certified))
}

/// Preconditioning applied to the nonnegative-side points at each step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GdMode {
    Original,
    Normalized,
    Isotropic,
    RadialIsotropic,
}

impl fmt::Display for GdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GdMode::Original => "original",
            GdMode::Normalized => "normalized",
            GdMode::Isotropic => "isotropic",
            GdMode::RadialIsotropic => "radial_isotropic",
        })
    }
}

impl FromStr for GdMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().replace('-', "_").as_str() {
            "original" => Ok(GdMode::Original),
            "normalized" => Ok(GdMode::Normalized),
            "isotropic" => Ok(GdMode::Isotropic),
            "radial_isotropic" | "radial" => Ok(GdMode::RadialIsotropic),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

impl GdMode {
    pub const ALL: [GdMode; 4] = [GdMode::Original, GdMode::Normalized, GdMode::Isotropic, GdMode::RadialIsotropic];

    /// Step sizes of the standard experiment: 1 for transformed modes, and
    /// `2/(d(d+1))` for the raw points to match their larger magnitude.
    pub fn standard_step(self, d: usize) -> f64 {
        match self {
            GdMode::Original => 2.0 / (d * (d + 1)) as f64,
            _ => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GdStep {
    pub iter: usize,
    pub w: Vec<f64>,
    pub loss: f64,
    /// `‖w − w_target‖`, or NaN without a target.
    pub distance: f64,
    /// No sample had `w·x ≥ 0`; the step was skipped.
    pub skipped: bool,
    /// The radial transform was blocked by a heavy subspace; the step used
    /// per-point normalization instead.
    pub fallback: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GdTrajectory {
    pub mode: GdMode,
    pub alpha: f64,
    pub steps: Vec<GdStep>,
}

impl GdTrajectory {
    pub fn final_distance(&self) -> f64 {
        self.steps.last().map_or(f64::NAN, |s| s.distance)
    }

    /// CSV rows `iter,loss,distance`.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "iter,loss,distance")?;
        for s in &self.steps {
            writeln!(out, "{},{:.16e},{:.16e}", s.iter, s.loss, s.distance)?;
        }
        Ok(())
    }
}

/// Gradient descent on the ReLU ℓ1 loss where each step transforms the
/// points with `w·x ≥ 0` by `A` (chosen per `mode`), takes the transformed
/// gradient `(1/|S|) Σ sgn(w'·x̃ − ỹ) x̃` with `w' = A⁻¹w`, and updates
/// `w ← w − α A ∇`. Row 0 of the trajectory is `w_init`.
pub fn gd_relu_transformed(
    samples: &LabeledDataset,
    mode: GdMode,
    alpha: f64,
    iters: usize,
    w_init: &[f64],
    w_target: Option<&[f64]>,
    gamma: f64,
) -> Result<GdTrajectory, ReluError> {
    if iters == 0 {
        return Err(ReluError::InvalidConfig("iters must be at least 1".into()));
    }
    let d = samples.dim();
    if w_init.len() != d {
        return Err(ReluError::InvalidConfig(format!("w_init has length {}, expected {d}", w_init.len())));
    }
    let record = |iter: usize, w: &[f64], skipped: bool, fallback: bool| GdStep {
        iter,
        w: w.to_vec(),
        loss: relu_l1_loss(samples, w).0,
        distance: w_target.map_or(f64::NAN, |t| norm(&crate::linalg::sub(w, t))),
        skipped,
        fallback,
    };
    let mut w = w_init.to_vec();
    let mut steps = vec![record(0, &w, false, false)];
    for it in 1..=iters {
        let s: Vec<&[f64]> = samples
            .covariates()
            .iter()
            .map(Vec::as_slice)
            .filter(|x| {
                let n = norm(x);
                n > 0.0 && dot(&w, x) >= -BOUNDARY_TOL * n
            })
            .collect();
        let sy: Vec<f64> = samples
            .iter()
            .filter(|(x, _)| {
                let n = norm(x);
                n > 0.0 && dot(&w, x) >= -BOUNDARY_TOL * n
            })
            .map(|(_, y)| y)
            .collect();
        if s.is_empty() {
            steps.push(record(it, &w, true, false));
            continue;
        }
        let (update, fallback) = transformed_step(&s, &sy, &w, d, mode, gamma)?;
        for (wi, u) in w.iter_mut().zip(&update) {
            *wi -= alpha * u;
        }
        steps.push(record(it, &w, false, fallback));
    }
    Ok(GdTrajectory { mode, alpha, steps })
}

/// Returns `A ∇_{w'} L'` and whether the radial transform fell back.
fn transformed_step(
    s: &[&[f64]],
    sy: &[f64],
    w: &[f64],
    d: usize,
    mode: GdMode,
    gamma: f64,
) -> Result<(Vec<f64>, bool), ReluError> {
    let k = s.len() as f64;
    // Each mode yields (A, normalize?) with x̃ = A x (/‖A x‖ when normalizing).
    let (a, normalize, fallback): (Option<Matrix>, bool, bool) = match mode {
        GdMode::Original => (None, false, false),
        GdMode::Normalized => (None, true, false),
        GdMode::Isotropic => {
            let sigma = SymPsdMatrix::from_symmetric_unchecked(second_moment(s, d).scale(1.0 / k));
            match inv_sqrt_psd(&sigma) {
                Ok(m) => (Some(m.into_matrix()), false, false),
                Err(_) => (None, true, true),
            }
        }
        GdMode::RadialIsotropic => match isotropize_or_span(s, d, gamma)? {
            Isotropy::Transform(t) => (Some(t.matrix().matrix().clone()), true, false),
            Isotropy::Heavy(_) => (None, true, true),
        },
    };
    let mut grad = vec![0.0; d];
    for (x, &y) in s.iter().zip(sy) {
        let mut xt = match &a {
            Some(a) => a.matvec(x),
            None => x.to_vec(),
        };
        // w'·x̃ = w·x/n since A is symmetric.
        let n = if normalize { norm(&xt) } else { 1.0 };
        xt.iter_mut().for_each(|v| *v /= n);
        let (pred, yt) = (dot(w, x) / n, y / n);
        let sg = sgn(pred - yt);
        for (g, v) in grad.iter_mut().zip(&xt) {
            *g += sg * v / k;
        }
    }
    let update = match &a {
        Some(a) => a.matvec(&grad),
        None => grad,
    };
    Ok((update, fallback))
}

pub fn relu_inlier_fraction(samples: &LabeledDataset, w: &[f64], fit_tol: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|(x, y)| fits(*y, Model::Relu.predict(w, x), fit_tol)).count() as f64 / samples.len() as f64
}

/// Snaps `w` and reports whether it equals `target` exactly.
pub fn snapped_equals(w: &[f64], target: &[f64], max_denominator: u64) -> bool {
    match (snap_to_rational(w, max_denominator), snap_to_rational(target, max_denominator)) {
        (Ok(a), Ok(b)) => a.same_values(&b),
        _ => false,
    }
}

/// Left side of the separation condition in the coordinates of `transform`
/// over `subset`: `Σ_good |(w̃0 − w̃*)·x̃| − Σ_bad |(w̃0 − w̃*)·x̃|`, where a
/// sample is good when `y = ReLU(w*·x)`. Positive values guarantee the
/// oracle's cut separates `w0` from `w*`.
pub fn separation_margin(
    samples: &LabeledDataset,
    w0: &[f64],
    w_star: &[f64],
    transform: &RadialTransform,
    subset: &[usize],
    fit_tol: f64,
) -> Result<f64, ReluError> {
    // w̃ = A⁻¹w, so (w̃0 − w̃*)·x̃ = (w0 − w*)·x / ‖Ax‖.
    let diff = crate::linalg::sub(w0, w_star);
    let mut total = 0.0;
    for &i in subset {
        let x = samples.x(i);
        let (_, n) = transform.apply(x);
        let v = (dot(&diff, x) / n).abs();
        if fits(samples.y(i), Model::Relu.predict(w_star, x), fit_tol) {
            total += v;
        } else {
            total -= v;
        }
    }
    Ok(total)
}
