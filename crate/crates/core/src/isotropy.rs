//! Radial-isotropic (Forster) transforms and heavy-subspace detection.
//!
//! Points `x_1..x_n ∈ R^d` are in γ-approximate radial-isotropic position when
//! `(d/n) Σ (x̂_i·v)² ≥ 1 - γ` for every unit `v`, i.e. when the smallest
//! eigenvalue of the normalized second moment `M = (d/n) Σ x̂_i x̂_iᵀ` is at
//! least `1 - γ`. A transform `A` exists for every γ iff no `k`-dimensional
//! subspace holds more than a `k/d` fraction of the points; such a subspace is
//! called heavy.
//!
//! [`radial_isotropize`] runs the alternating fixed point
//! `u_i = A x_i / ‖A x_i‖`, `A ← W·A` with `W` a whitening factor of
//! `M(u)`, until `M` is the identity to `tol`. When the points admit no
//! transform the iteration stalls: the images of a heavy subspace collapse
//! onto the top eigenspace of `M` while everything else drifts towards its
//! orthogonal complement. Candidate subspaces read off that spectrum are then
//! certified by exact membership counts on the original points, so a returned
//! [`HeavySubspace`] is always genuine.

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    cholesky, forward_substitute, norm, orthonormalize, second_moment, sqrt_psd, sym_eigendecomp, LinalgError, Matrix,
    OrthonormalBasis, SymEigen, SymPsdMatrix,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsotropyError {
    #[error("need at least d = {dim} points, got {points}")]
    InsufficientPoints { points: usize, dim: usize },
    #[error("point {index} is the zero vector")]
    ZeroVector { index: usize },
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("invalid gamma {0}; must lie in (0, 1)")]
    InvalidGamma(f64),
    #[error(
        "no transform reached gamma after {iterations} iterations (achieved {gamma_achieved:.3e}) and no heavy subspace was certified"
    )]
    Undetermined { iterations: usize, gamma_achieved: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotropyConfig {
    /// Target approximation level γ ∈ (0, 1).
    pub gamma: f64,
    /// Iteration cap; `None` uses `10·d·⌈ln(1/γ)⌉ + 1000`.
    pub max_iters: Option<usize>,
    /// Stop once `‖M - I‖_F ≤ tol`.
    pub tol: f64,
    /// Stalled iterations are probed for heavy subspaces this often.
    pub heavy_check_every: usize,
    /// Angular distance for collecting candidate members in transformed space.
    pub collect_tol: f64,
    /// Relative distance `‖x - proj_V x‖ ≤ member_tol·‖x‖` for exact membership.
    pub member_tol: f64,
    /// Exhaustive subset search fallback runs only up to this dimension.
    pub exhaustive_max_dim: usize,
    /// ... and only when it enumerates at most this many subsets.
    pub exhaustive_max_subsets: usize,
}

impl Default for IsotropyConfig {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            max_iters: None,
            tol: 1e-9,
            heavy_check_every: 10,
            collect_tol: 1e-6,
            member_tol: 1e-9,
            exhaustive_max_dim: 6,
            exhaustive_max_subsets: 2_000_000,
        }
    }
}

impl IsotropyConfig {
    pub fn with_gamma(gamma: f64) -> Self {
        Self { gamma, ..Self::default() }
    }

    pub fn iteration_cap(&self, dim: usize) -> usize {
        self.max_iters.unwrap_or_else(|| 10 * dim * (1.0 / self.gamma).ln().ceil() as usize + 1000)
    }
}

/// A symmetric positive definite `A` with `{A x_i / ‖A x_i‖}` in
/// `gamma_achieved`-approximate radial-isotropic position.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialTransform {
    matrix: SymPsdMatrix,
    pub gamma_achieved: f64,
    pub iterations_used: usize,
    pub log_condition_number: f64,
}

impl RadialTransform {
    pub fn identity(dim: usize) -> Self {
        Self { matrix: SymPsdMatrix::identity(dim), gamma_achieved: 0.0, iterations_used: 0, log_condition_number: 0.0 }
    }

    pub fn matrix(&self) -> &SymPsdMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `(A x / ‖A x‖, ‖A x‖)`.
    pub fn apply(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let mut ax = self.matrix.matvec(x);
        let n = norm(&ax);
        ax.iter_mut().for_each(|v| *v /= n);
        (ax, n)
    }

    pub fn diagnostics(&self) -> TransformDiagnostics {
        TransformDiagnostics {
            iterations: self.iterations_used,
            gamma_achieved: self.gamma_achieved,
            log_condition_number: self.log_condition_number,
        }
    }
}

/// Serializable summary of a [`RadialTransform`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformDiagnostics {
    pub iterations: usize,
    pub gamma_achieved: f64,
    pub log_condition_number: f64,
}

/// A `k`-dimensional subspace containing more than a `k/d` fraction of the points.
#[derive(Clone, Debug, PartialEq)]
pub struct HeavySubspace {
    pub basis: OrthonormalBasis,
    /// Fraction of the input points lying in `span(basis)`.
    pub fraction: f64,
    /// Indices of those points.
    pub members: Vec<usize>,
}

impl HeavySubspace {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Isotropy {
    Transform(RadialTransform),
    Heavy(HeavySubspace),
}

/// Outcome of [`find_heavy_subspace`].
#[derive(Clone, Debug, PartialEq)]
pub enum HeavySearch {
    Found(HeavySubspace),
    /// The iteration converged (or reached γ) without a heavy subspace.
    NoneFound {
        iterations: usize,
        gamma_achieved: f64,
    },
}

/// Exact answer of [`check_forster_condition`].
#[derive(Clone, Debug, PartialEq)]
pub struct ForsterCheck {
    pub satisfiable: bool,
    pub witness: Option<HeavySubspace>,
}

fn unit_points<R: AsRef<[f64]>>(points: &[R], dim: usize) -> Result<Vec<Vec<f64>>, IsotropyError> {
    points
        .iter()
        .enumerate()
        .map(|(index, p)| {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(IsotropyError::DimensionMismatch { index, expected: dim, found: p.len() });
            }
            let n = norm(p);
            if n == 0.0 || !n.is_finite() {
                return Err(IsotropyError::ZeroVector { index });
            }
            Ok(p.iter().map(|v| v / n).collect())
        })
        .collect()
}

fn normalized_moment(units: &[Vec<f64>], dim: usize) -> SymPsdMatrix {
    let scale = dim as f64 / units.len() as f64;
    SymPsdMatrix::from_symmetric_unchecked(second_moment(units, dim).scale(scale))
}

fn frobenius_gap_to_identity(m: &SymPsdMatrix) -> f64 {
    let d = m.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { 1.0 } else { 0.0 };
            let e = m[(i, j)] - target;
            s += e * e;
        }
    }
    s.sqrt()
}

/// Counts the points inside `span(basis)` and returns the subspace if it is heavy.
fn certify(units: &[Vec<f64>], basis: OrthonormalBasis, member_tol: f64) -> Option<HeavySubspace> {
    let d = basis.ambient_dim();
    let k = basis.dim();
    if k == 0 || k >= d {
        return None;
    }
    let members: Vec<usize> =
        units.iter().enumerate().filter(|(_, u)| basis.contains(u, member_tol)).map(|(i, _)| i).collect();
    let n = units.len();
    if members.len() * d > k * n {
        Some(HeavySubspace { fraction: members.len() as f64 / n as f64, basis, members })
    } else {
        None
    }
}

/// Span of the given (unit) points as the top-`k` eigenvectors of their second moment.
fn fitted_span(units: &[Vec<f64>], members: &[usize], k: usize, dim: usize) -> Option<OrthonormalBasis> {
    let pts: Vec<&Vec<f64>> = members.iter().map(|&i| &units[i]).collect();
    let m = SymPsdMatrix::from_symmetric_unchecked(second_moment(&pts, dim));
    let eig = sym_eigendecomp(&m).ok()?;
    OrthonormalBasis::new(dim, eig.vectors.vectors()[..k].to_vec()).ok()
}

/// Reads candidate subspaces off the spectrum of `M(images)` and certifies them
/// against the original unit points.
fn probe_heavy(units: &[Vec<f64>], images: &[Vec<f64>], eig: &SymEigen, cfg: &IsotropyConfig) -> Option<HeavySubspace> {
    let d = eig.values.len();
    let n = units.len();
    let vecs = eig.vectors.vectors();
    for k in 1..d {
        // Heavy subspaces sit in the top eigenspace; the bottom one is probed too
        // since it is equally cheap.
        for block in [&vecs[..k], &vecs[d - k..]] {
            let w = OrthonormalBasis::new(d, block.to_vec()).ok()?;
            let collected: Vec<usize> =
                images.iter().enumerate().filter(|(_, u)| w.distance(u) <= cfg.collect_tol).map(|(i, _)| i).collect();
            if collected.len() * d <= k * n {
                continue;
            }
            if let Some(span) = fitted_span(units, &collected, k, d) {
                if let Some(h) = certify(units, span, cfg.member_tol) {
                    return Some(h);
                }
            }
        }
    }
    None
}

/// If the points do not span `R^d`, their span is heavy (fraction 1).
fn rank_deficient_span(units: &[Vec<f64>], dim: usize, cfg: &IsotropyConfig) -> Option<HeavySubspace> {
    let m = SymPsdMatrix::from_symmetric_unchecked(second_moment(units, dim));
    let eig = sym_eigendecomp(&m).ok()?;
    let cutoff = 1e-12 * eig.max_value();
    let rank = eig.values.iter().filter(|&&l| l > cutoff).count();
    if rank >= dim {
        return None;
    }
    let span = OrthonormalBasis::new(dim, eig.vectors.vectors()[..rank].to_vec()).ok()?;
    certify(units, span, cfg.member_tol)
}

fn exhaustive_budget(n: usize, d: usize, cap: usize) -> bool {
    let mut total: f64 = 0.0;
    let mut c: f64 = 1.0;
    for k in 1..d {
        c = c * (n + 1 - k) as f64 / k as f64;
        total += c;
    }
    total <= cap as f64
}

/// Heavy subspace by enumerating spans of point subsets of size `1..d-1`.
/// Any maximal heavy subspace is spanned by the points it contains, so this is exact.
fn exhaustive_heavy(units: &[Vec<f64>], dim: usize, member_tol: f64) -> Option<HeavySubspace> {
    for k in 1..dim {
        for subset in (0..units.len()).combinations(k) {
            let vecs: Vec<Vec<f64>> = subset.iter().map(|&i| units[i].clone()).collect();
            let basis = orthonormalize(dim, &vecs, 1e-9);
            if basis.dim() != k {
                continue;
            }
            if let Some(h) = certify(units, basis, member_tol) {
                return Some(h);
            }
        }
    }
    None
}

/// Exact check of "every `k`-dim subspace holds at most a `k/d` fraction".
/// Exponential in `d`; meant for small instances and as a test oracle.
pub fn check_forster_condition<R: AsRef<[f64]>>(points: &[R], dim: usize) -> Result<ForsterCheck, IsotropyError> {
    let units = unit_points(points, dim)?;
    let witness = exhaustive_heavy(&units, dim, IsotropyConfig::default().member_tol);
    Ok(ForsterCheck { satisfiable: witness.is_none(), witness })
}

pub fn find_heavy_subspace<R: AsRef<[f64]>>(points: &[R], dim: usize) -> Result<HeavySearch, IsotropyError> {
    find_heavy_subspace_with(points, dim, &IsotropyConfig::default())
}

pub fn find_heavy_subspace_with<R: AsRef<[f64]>>(
    points: &[R],
    dim: usize,
    cfg: &IsotropyConfig,
) -> Result<HeavySearch, IsotropyError> {
    match radial_isotropize_with(points, dim, cfg) {
        Ok(Isotropy::Heavy(h)) => Ok(HeavySearch::Found(h)),
        Ok(Isotropy::Transform(t)) => {
            Ok(HeavySearch::NoneFound { iterations: t.iterations_used, gamma_achieved: t.gamma_achieved })
        }
        Err(IsotropyError::Undetermined { iterations, gamma_achieved }) => {
            Ok(HeavySearch::NoneFound { iterations, gamma_achieved })
        }
        Err(e) => Err(e),
    }
}

pub fn radial_isotropize<R: AsRef<[f64]>>(points: &[R], dim: usize, gamma: f64) -> Result<Isotropy, IsotropyError> {
    radial_isotropize_with(points, dim, &IsotropyConfig::with_gamma(gamma))
}

pub fn radial_isotropize_with<R: AsRef<[f64]>>(
    points: &[R],
    dim: usize,
    cfg: &IsotropyConfig,
) -> Result<Isotropy, IsotropyError> {
    if !(cfg.gamma > 0.0 && cfg.gamma < 1.0) {
        return Err(IsotropyError::InvalidGamma(cfg.gamma));
    }
    let n = points.len();
    if n < dim || dim == 0 {
        return Err(IsotropyError::InsufficientPoints { points: n, dim });
    }
    let units = unit_points(points, dim)?;
    if dim == 1 {
        return Ok(Isotropy::Transform(RadialTransform::identity(1)));
    }

    let max_iters = cfg.iteration_cap(dim);
    let mut images = units.clone();
    let mut a = Matrix::identity(dim);
    let mut iterations = 0;
    let mut converged = false;
    let mut gap_at_last_check = f64::INFINITY;

    loop {
        let m = normalized_moment(&images, dim);
        let gap = frobenius_gap_to_identity(&m);
        if gap <= cfg.tol {
            converged = true;
            break;
        }
        if iterations >= max_iters {
            break;
        }
        if iterations > 0 && iterations % cfg.heavy_check_every == 0 {
            // Only probe when progress has stalled: a converging run halves the
            // gap many times over between checks.
            if gap > 0.5 * gap_at_last_check {
                let eig = sym_eigendecomp(&m)?;
                if let Some(h) = probe_heavy(&units, &images, &eig, cfg) {
                    return Ok(Isotropy::Heavy(h));
                }
            }
            gap_at_last_check = gap;
        }
        // M has unit average eigenvalue, so a tiny pivot means rank deficiency.
        let l = match cholesky(&m).ok().filter(|l| (0..dim).all(|i| l[(i, i)] * l[(i, i)] > 1e-12)) {
            Some(l) => l,
            None => {
                if let Some(h) = rank_deficient_span(&units, dim, cfg) {
                    return Ok(Isotropy::Heavy(h));
                }
                let eig = sym_eigendecomp(&m)?;
                if let Some(h) = probe_heavy(&units, &images, &eig, cfg) {
                    return Ok(Isotropy::Heavy(h));
                }
                return Err(IsotropyError::Linalg(LinalgError::SingularMatrix { min_eigenvalue: eig.min_value() }));
            }
        };
        // A ← L⁻¹A, and every image u ← L⁻¹u / ‖L⁻¹u‖.
        for img in images.iter_mut() {
            forward_substitute(&l, img);
            let nn = norm(img);
            img.iter_mut().for_each(|v| *v /= nn);
        }
        let mut next = Matrix::zeros(dim, dim);
        for j in 0..dim {
            let mut col = a.column(j);
            forward_substitute(&l, &mut col);
            for i in 0..dim {
                next[(i, j)] = col[i];
            }
        }
        let s = next.max_abs();
        a = next.scale(1.0 / s);
        iterations += 1;
    }

    let final_m = normalized_moment(&images, dim);
    let eig = sym_eigendecomp(&final_m)?;
    let gamma_achieved = (1.0 - eig.min_value()).max(0.0);
    if !converged {
        if let Some(h) = probe_heavy(&units, &images, &eig, cfg) {
            return Ok(Isotropy::Heavy(h));
        }
        if let Some(h) = rank_deficient_span(&units, dim, cfg) {
            return Ok(Isotropy::Heavy(h));
        }
        if dim <= cfg.exhaustive_max_dim && exhaustive_budget(n, dim, cfg.exhaustive_max_subsets) {
            if let Some(h) = exhaustive_heavy(&units, dim, cfg.member_tol) {
                return Ok(Isotropy::Heavy(h));
            }
        }
        if gamma_achieved > cfg.gamma {
            return Err(IsotropyError::Undetermined { iterations, gamma_achieved });
        }
    }

    // The images only depend on A up to a left rotation, so A is replaced by
    // its symmetric polar factor sqrt(AᵀA).
    let ata = SymPsdMatrix::from_symmetric_unchecked(a.transpose().matmul(&a));
    let sym = sqrt_psd(&ata)?;
    let sym_eig = sym_eigendecomp(&sym)?;
    let (lmax, lmin) = (sym_eig.max_value(), sym_eig.min_value());
    if !(lmin > 0.0) {
        return Err(IsotropyError::Linalg(LinalgError::SingularMatrix { min_eigenvalue: lmin }));
    }
    let matrix = SymPsdMatrix::from_symmetric_unchecked(sym.into_matrix().scale(1.0 / lmax));
    Ok(Isotropy::Transform(RadialTransform {
        matrix,
        gamma_achieved,
        iterations_used: iterations,
        log_condition_number: (lmax / lmin).ln(),
    }))
}

/// Smallest eigenvalue of `(d/n) Σ u_i u_iᵀ` for `u_i = A x_i / ‖A x_i‖`.
pub fn isotropy_lambda_min<R: AsRef<[f64]>>(a: &SymPsdMatrix, points: &[R]) -> Result<f64, LinalgError> {
    let dim = a.dim();
    let images: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let mut v = a.matvec(p.as_ref());
            let n = norm(&v);
            v.iter_mut().for_each(|x| *x /= n);
            v
        })
        .collect();
    Ok(sym_eigendecomp(&normalized_moment(&images, dim))?.min_value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn gaussian_points(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = seeded(seed);
        (0..n).map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect()).collect()
    }

    fn expect_transform(r: Isotropy) -> RadialTransform {
        match r {
            Isotropy::Transform(t) => t,
            Isotropy::Heavy(h) => panic!("unexpected heavy subspace {h:?}"),
        }
    }

    #[test]
    fn standard_basis_is_already_isotropic() {
        let pts: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let t = expect_transform(radial_isotropize(&pts, 4, 0.5).unwrap());
        assert!(t.gamma_achieved <= 1e-12);
        assert!(t.matrix().matrix().sub(&Matrix::identity(4)).max_abs() < 1e-12);
    }

    #[test]
    fn duplicated_axis_is_heavy() {
        let pts = vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        match radial_isotropize(&pts, 2, 0.5).unwrap() {
            Isotropy::Heavy(h) => {
                assert_eq!(h.dim(), 1);
                assert!((h.fraction - 2.0 / 3.0).abs() < 1e-15);
                assert_eq!(h.members, vec![0, 1]);
                assert!(h.basis.vectors()[0][0].abs() > 1.0 - 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn random_unit_vectors_reach_gamma() {
        let pts = gaussian_points(50, 5, 21);
        let t = expect_transform(radial_isotropize(&pts, 5, 0.5).unwrap());
        // Independent check: recompute the images from A and take the eigenvalue.
        let lmin = isotropy_lambda_min(t.matrix(), &pts).unwrap();
        assert!(lmin >= 0.5);
        assert!(lmin >= 1.0 - t.gamma_achieved - 1e-12);
        assert!(t.log_condition_number.is_finite());
    }

    #[test]
    fn anisotropic_cloud_is_isotropized() {
        let mut pts = gaussian_points(200, 3, 4);
        for p in pts.iter_mut() {
            p[0] *= 50.0;
            p[1] += 3.0 * p[2];
        }
        let t = expect_transform(radial_isotropize(&pts, 3, 0.5).unwrap());
        assert!(t.gamma_achieved < 1e-8);
        let eig = sym_eigendecomp(t.matrix()).unwrap();
        assert!(eig.min_value() > 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(radial_isotropize(&[vec![1.0, 0.0]], 2, 0.5), Err(IsotropyError::InsufficientPoints { .. })));
        assert!(matches!(
            radial_isotropize(&[vec![1.0, 0.0], vec![0.0, 0.0]], 2, 0.5),
            Err(IsotropyError::ZeroVector { index: 1 })
        ));
        assert!(matches!(radial_isotropize(&[vec![1.0]], 1, 1.0), Err(IsotropyError::InvalidGamma(_))));
    }

    #[test]
    fn forster_condition_examples() {
        let c = check_forster_condition(&[vec![1.0, 0.0], vec![0.0, 1.0]], 2).unwrap();
        assert!(c.satisfiable);
        let c = check_forster_condition(&[vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], 2).unwrap();
        assert!(!c.satisfiable);
        let w = c.witness.unwrap();
        assert_eq!(w.members, vec![0, 1]);
        let c = check_forster_condition(&gaussian_points(20, 3, 8), 3).unwrap();
        assert!(c.satisfiable);
    }

    #[test]
    fn planted_line_in_r3_is_found() {
        let mut rng = seeded(12);
        let mut pts = gaussian_points(50, 3, 13);
        for _ in 0..50 {
            let s: f64 = rng.random_range(0.5..3.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
            pts.push(vec![s, 0.0, 0.0]);
        }
        match find_heavy_subspace(&pts, 3).unwrap() {
            HeavySearch::Found(h) => {
                assert_eq!(h.dim(), 1);
                assert!((h.fraction - 0.5).abs() < 1e-12);
                assert!(h.basis.vectors()[0][0].abs() > 1.0 - 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn isotropic_cloud_has_no_heavy_subspace() {
        let pts = gaussian_points(300, 4, 3);
        assert!(matches!(find_heavy_subspace(&pts, 4).unwrap(), HeavySearch::NoneFound { .. }));
    }

    #[test]
    fn degenerate_span_is_returned_whole() {
        let b = gaussian_points(2, 4, 5);
        let mut rng = seeded(6);
        let pts: Vec<Vec<f64>> = (0..40)
            .map(|_| {
                let (s, t): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                (0..4).map(|j| s * b[0][j] + t * b[1][j]).collect()
            })
            .collect();
        match find_heavy_subspace(&pts, 4).unwrap() {
            HeavySearch::Found(h) => {
                assert_eq!(h.dim(), 2);
                assert_eq!(h.fraction, 1.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn heavy_fraction_recomputes_exactly() {
        let mut pts = gaussian_points(30, 3, 14);
        let plane = [vec![1.0, 2.0, 0.0], vec![0.0, 1.0, -1.0]];
        let mut rng = seeded(15);
        for _ in 0..70 {
            let (s, t): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
            pts.push((0..3).map(|j| s * plane[0][j] + t * plane[1][j]).collect());
        }
        let h = match radial_isotropize(&pts, 3, 0.5).unwrap() {
            Isotropy::Heavy(h) => h,
            other => panic!("{other:?}"),
        };
        let k = h.dim();
        let count = pts.iter().filter(|p| h.basis.distance(p) <= 1e-9 * norm(p)).count();
        assert!((count as f64 / pts.len() as f64 - h.fraction).abs() <= 1e-12);
        assert!(h.fraction > k as f64 / 3.0);
    }

    #[test]
    fn scale_invariance() {
        let pts = gaussian_points(40, 3, 31);
        let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|v| v * 7.5).collect()).collect();
        let a = expect_transform(radial_isotropize(&pts, 3, 0.5).unwrap());
        let b = expect_transform(radial_isotropize(&scaled, 3, 0.5).unwrap());
        for (p, q) in pts.iter().zip(&scaled) {
            let (u, _) = a.apply(p);
            let (v, _) = b.apply(q);
            for (x, y) in u.iter().zip(&v) {
                assert!((x - y).abs() <= 1e-8);
            }
        }
    }
}
