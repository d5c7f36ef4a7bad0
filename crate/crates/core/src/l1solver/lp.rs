//! Least absolute deviations by linear programming.
//!
//! The primal `min_w Σ|y_i - w·x_i|` (equivalently `min Σ t_i` subject to
//! `-t_i ≤ y_i - w·x_i ≤ t_i`) has the bounded-variable dual
//!
//! ```text
//!     max  Σ y_i u_i   s.t.  Σ u_i x_i = 0,   -1 ≤ u_i ≤ 1
//! ```
//!
//! with only `d` equality rows. We run a revised primal simplex on the dual
//! with a dense `d × d` basis inverse. Optimal `w` is read off the basis: the
//! basic samples are interpolated exactly, which is also what makes the
//! ℓ1 minimizer land exactly on the ℓ0 minimizer when the structural
//! condition holds.

use crate::dataset::{fits, LabeledDataset, DEFAULT_FIT_TOL};
use crate::linalg::{dot, solve, Matrix};

use super::L1Error;

const REDUCED_COST_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-11;
const FEASIBILITY_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;
/// Consecutive degenerate pivots before pricing falls back to Bland's rule.
const DEGENERATE_STREAK_FOR_BLAND: usize = 25;

#[derive(Clone, Debug, PartialEq)]
pub struct L1FitResult {
    pub w: Vec<f64>,
    /// `Σ |y_i - w·x_i|`.
    pub objective: f64,
    pub residuals: Vec<f64>,
    /// Samples with `|residual| ≤ fit_tol·(1 + |y|)`.
    pub exact_fit_count: usize,
    /// Optimal dual point `u ∈ [-1, 1]^m` with `Σ u_i x_i = 0`.
    pub dual: Vec<f64>,
    /// `Σ|r_i| - Σ y_i u_i`; zero up to rounding at an optimum.
    pub duality_gap: f64,
    pub pivots: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    pub max_pivots: Option<usize>,
    pub fit_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { max_pivots: None, fit_tol: DEFAULT_FIT_TOL }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Basic,
    AtLower,
    AtUpper,
}

/// Dense bounded-variable revised simplex, minimizing `cᵀz` s.t. `A z = 0`,
/// `lo ≤ z ≤ hi`. Columns `0..m` are the samples, `m..m+d` are artificials.
struct Simplex<'a> {
    xs: &'a [Vec<f64>],
    d: usize,
    m: usize,
    art_sign: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    value: Vec<f64>,
    status: Vec<Status>,
    basis: Vec<usize>,
    binv: Matrix,
    pivots: usize,
    since_refactor: usize,
    max_pivots: usize,
}

impl<'a> Simplex<'a> {
    fn column(&self, j: usize) -> Vec<f64> {
        if j < self.m {
            self.xs[j].clone()
        } else {
            let mut e = vec![0.0; self.d];
            e[j - self.m] = self.art_sign[j - self.m];
            e
        }
    }

    fn column_dot(&self, row: &[f64], j: usize) -> f64 {
        if j < self.m {
            dot(row, &self.xs[j])
        } else {
            row[j - self.m] * self.art_sign[j - self.m]
        }
    }

    fn multipliers(&self) -> Vec<f64> {
        // π = c_Bᵀ B⁻¹
        let mut pi = vec![0.0; self.d];
        for (r, &b) in self.basis.iter().enumerate() {
            let c = self.cost[b];
            if c != 0.0 {
                for (p, v) in pi.iter_mut().zip(self.binv.row(r)) {
                    *p += c * v;
                }
            }
        }
        pi
    }

    fn refactor(&mut self) -> Result<(), L1Error> {
        let cols: Vec<Vec<f64>> = self.basis.iter().map(|&j| self.column(j)).collect();
        let b = Matrix::from_columns(&cols);
        let mut inv = Matrix::zeros(self.d, self.d);
        for k in 0..self.d {
            let mut e = vec![0.0; self.d];
            e[k] = 1.0;
            let col = solve(&b, &e, 1e-14).ok_or(L1Error::Numerical("singular simplex basis"))?;
            for i in 0..self.d {
                inv[(i, k)] = col[i];
            }
        }
        self.binv = inv;
        // x_B = -B⁻¹ N x_N
        let mut rhs = vec![0.0; self.d];
        for j in 0..(self.m + self.d) {
            if self.status[j] != Status::Basic && self.value[j] != 0.0 {
                let v = self.value[j];
                let col = self.column(j);
                for i in 0..self.d {
                    rhs[i] -= v * col[i];
                }
            }
        }
        let xb = self.binv.matvec(&rhs);
        for (r, &b) in self.basis.iter().enumerate() {
            self.value[b] = xb[r];
        }
        self.since_refactor = 0;
        Ok(())
    }

    /// Runs to optimality for the current cost vector.
    fn optimize(&mut self) -> Result<(), L1Error> {
        let n = self.m + self.d;
        let cost_scale = 1.0 + self.cost.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let mut degenerate_streak = 0usize;
        loop {
            if self.pivots >= self.max_pivots {
                return Err(L1Error::SolverStalled { pivots: self.pivots });
            }
            let pi = self.multipliers();
            let bland = degenerate_streak >= DEGENERATE_STREAK_FOR_BLAND;
            let mut entering: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for j in 0..n {
                let dir = match self.status[j] {
                    Status::Basic => continue,
                    Status::AtLower if self.hi[j] > self.lo[j] => 1.0,
                    Status::AtUpper if self.hi[j] > self.lo[j] => -1.0,
                    _ => continue,
                };
                let rc = self.cost[j] - self.column_dot(&pi, j);
                // Improvement rate along the feasible direction.
                let gain = -rc * dir;
                if gain > REDUCED_COST_TOL * cost_scale {
                    if bland {
                        entering = Some((j, dir));
                        break;
                    }
                    if gain > best {
                        best = gain;
                        entering = Some((j, dir));
                    }
                }
            }
            let Some((q, dir)) = entering else {
                return Ok(());
            };

            // Basic variables move by -dir·t·alpha.
            let col = self.column(q);
            let alpha = self.binv.matvec(&col);
            let mut step = self.hi[q] - self.lo[q];
            let mut leave: Option<(usize, Status)> = None;
            for (r, &b) in self.basis.iter().enumerate() {
                let rate = -dir * alpha[r];
                if rate.abs() <= PIVOT_TOL {
                    continue;
                }
                let (t, bound) = if rate < 0.0 {
                    ((self.value[b] - self.lo[b]) / -rate, Status::AtLower)
                } else if self.hi[b].is_finite() {
                    ((self.hi[b] - self.value[b]) / rate, Status::AtUpper)
                } else {
                    continue;
                };
                let t = t.max(0.0);
                let better = match leave {
                    None => t < step,
                    Some((lr, _)) => t < step || (t == step && b < self.basis[lr]),
                };
                if better {
                    step = t;
                    leave = Some((r, bound));
                }
            }
            if !step.is_finite() {
                return Err(L1Error::Numerical("unbounded ray in a bounded LP"));
            }
            degenerate_streak = if step <= 1e-14 { degenerate_streak + 1 } else { 0 };

            self.value[q] += dir * step;
            for (r, &b) in self.basis.iter().enumerate() {
                self.value[b] -= dir * step * alpha[r];
            }
            self.pivots += 1;

            match leave {
                None => {
                    // Bound flip: entering variable crosses to its other bound.
                    self.status[q] = if dir > 0.0 { Status::AtUpper } else { Status::AtLower };
                    self.value[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                }
                Some((r, bound)) => {
                    let out = self.basis[r];
                    self.status[out] = bound;
                    self.value[out] = if bound == Status::AtLower { self.lo[out] } else { self.hi[out] };
                    self.status[q] = Status::Basic;
                    self.basis[r] = q;
                    let p = alpha[r];
                    let pivot_row: Vec<f64> = self.binv.row(r).iter().map(|v| v / p).collect();
                    for i in 0..self.d {
                        if i == r {
                            continue;
                        }
                        let f = alpha[i];
                        if f != 0.0 {
                            for k in 0..self.d {
                                self.binv[(i, k)] -= f * pivot_row[k];
                            }
                        }
                    }
                    for k in 0..self.d {
                        self.binv[(r, k)] = pivot_row[k];
                    }
                    self.since_refactor += 1;
                    if self.since_refactor >= REFACTOR_EVERY {
                        self.refactor()?;
                    }
                }
            }
        }
    }
}

/// Global minimizer of `Σ_i |y_i - w·x_i|`.
pub fn l1_fit_linear(samples: &LabeledDataset) -> Result<L1FitResult, L1Error> {
    l1_fit_linear_with(samples, &SimplexOptions::default())
}

pub fn l1_fit_linear_with(samples: &LabeledDataset, opts: &SimplexOptions) -> Result<L1FitResult, L1Error> {
    let m = samples.len();
    let d = samples.dim();
    if m == 0 {
        return Err(L1Error::Empty);
    }
    if samples.iter().any(|(x, y)| !y.is_finite() || x.iter().any(|v| !v.is_finite())) {
        return Err(L1Error::NonFinite);
    }
    let xs = samples.covariates();
    let ys = samples.labels();

    // Start every dual variable at sign(y_i), which is dual-optimal for w = 0,
    // and let phase one drive the artificials to zero.
    let mut value = vec![0.0; m + d];
    let mut status = vec![Status::AtLower; m + d];
    for i in 0..m {
        if ys[i] > 0.0 {
            value[i] = 1.0;
            status[i] = Status::AtUpper;
        } else {
            value[i] = -1.0;
        }
    }
    let mut residual = vec![0.0; d];
    for i in 0..m {
        for k in 0..d {
            residual[k] -= value[i] * xs[i][k];
        }
    }
    let art_sign: Vec<f64> = residual.iter().map(|&r| if r < 0.0 { -1.0 } else { 1.0 }).collect();
    for k in 0..d {
        value[m + k] = residual[k] * art_sign[k];
        status[m + k] = Status::Basic;
    }
    let mut lo = vec![-1.0; m + d];
    let mut hi = vec![1.0; m + d];
    for k in 0..d {
        lo[m + k] = 0.0;
        hi[m + k] = f64::INFINITY;
    }
    let mut cost = vec![0.0; m + d];
    for k in 0..d {
        cost[m + k] = 1.0;
    }
    let binv = Matrix::from_diag(&art_sign);
    let mut lp = Simplex {
        xs,
        d,
        m,
        art_sign,
        lo,
        hi,
        cost,
        value,
        status,
        basis: (m..m + d).collect(),
        binv,
        pivots: 0,
        since_refactor: 0,
        max_pivots: opts.max_pivots.unwrap_or(100 * (m + d) + 1000),
    };

    lp.optimize()?;
    let scale = 1.0 + xs.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())) * m as f64;
    let infeasibility: f64 = (0..d).map(|k| lp.value[m + k]).sum();
    if infeasibility > FEASIBILITY_TOL * scale {
        return Err(L1Error::Numerical("phase one left artificials positive"));
    }

    // Phase two: artificials are pinned at zero.
    for k in 0..d {
        let j = m + k;
        lp.cost[j] = 0.0;
        lp.hi[j] = 0.0;
        if lp.status[j] != Status::Basic {
            lp.value[j] = 0.0;
            lp.status[j] = Status::AtLower;
        }
    }
    for i in 0..m {
        lp.cost[i] = -ys[i];
    }
    lp.refactor()?;
    lp.optimize()?;
    lp.refactor()?;

    // w = -π; re-solve the interpolation system on the basic samples when the
    // basis is all samples, which is more accurate than the running inverse.
    let pi = lp.multipliers();
    let mut w: Vec<f64> = pi.iter().map(|p| -p).collect();
    if lp.basis.iter().all(|&b| b < m) {
        let rows: Vec<Vec<f64>> = lp.basis.iter().map(|&b| xs[b].clone()).collect();
        let rhs: Vec<f64> = lp.basis.iter().map(|&b| ys[b]).collect();
        if let Some(exact) = solve(&Matrix::from_rows(&rows), &rhs, 1e-13) {
            w = exact;
        }
    }

    let residuals: Vec<f64> = samples.iter().map(|(x, y)| y - dot(&w, x)).collect();
    let objective = residuals.iter().map(|r| r.abs()).sum::<f64>();
    let dual: Vec<f64> = lp.value[..m].to_vec();
    let dual_value: f64 = dual.iter().zip(ys).map(|(u, y)| u * y).sum();
    let exact_fit_count = samples.iter().filter(|(x, y)| fits(*y, dot(&w, x), opts.fit_tol)).count();
    Ok(L1FitResult {
        w,
        objective,
        residuals,
        exact_fit_count,
        dual,
        duality_gap: objective - dual_value,
        pivots: lp.pivots,
    })
}
