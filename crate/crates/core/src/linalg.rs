//! Dense symmetric linear algebra.
//!
//! Everything here works on small row-major matrices (d up to a few hundred).
//! Symmetric eigendecompositions use cyclic Jacobi rotations, which are slow
//! compared to QR-based methods but deterministic and accurate to the last
//! few ulps on the eigenvectors, which the isotropy iteration relies on.

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

/// Relative tolerance on `|M[i][j] - M[j][i]|` accepted as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Jacobi sweeps stop once the off-diagonal Frobenius norm drops below this
/// fraction of `‖M‖_F`.
pub const JACOBI_REL_TOL: f64 = 1e-12;
/// Maximum number of cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Tolerance on inner products and norms of an orthonormal basis.
pub const ORTHONORMAL_TOL: f64 = 1e-10;
/// Eigenvalues below `SINGULAR_RTOL * λmax` are treated as zero.
pub const SINGULAR_RTOL: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not symmetric: |M[{row}][{col}] - M[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular or indefinite (smallest eigenvalue {min_eigenvalue:e})")]
    SingularMatrix { min_eigenvalue: f64 },
    #[error("basis already spans the ambient space; complement is empty")]
    EmptyComplement,
    #[error("vectors are not orthonormal: {0}")]
    NotOrthonormal(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Jacobi iteration did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from equally sized rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self { rows: rows.len(), cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns<R: AsRef<[f64]>>(cols: &[R]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `selfᵀ · v`.
    pub fn t_matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, v.len(), "t_matvec shape mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            axpy(vi, self.row(i), &mut out);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Averages `M` with `Mᵀ` in place.
    pub fn symmetrize(&mut self) {
        assert!(self.is_square());
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
    }

    /// Spectral norm of a symmetric matrix (largest |eigenvalue|).
    pub fn sym_spectral_norm(&self) -> f64 {
        let mut m = self.clone();
        m.symmetrize();
        let eig = jacobi(&m, JACOBI_REL_TOL, JACOBI_MAX_SWEEPS).expect("jacobi on symmetric input");
        eig.values.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }
}

/// A symmetric matrix. The constructor enforces the symmetry invariant; PSD-ness
/// is checked by the operations that need it.
#[derive(Clone, Debug, PartialEq)]
pub struct SymPsdMatrix(Matrix);

impl SymPsdMatrix {
    pub fn new(m: Matrix) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare { rows: m.rows, cols: m.cols });
        }
        for i in 0..m.rows {
            for j in (i + 1)..m.cols {
                let (a, b) = (m[(i, j)], m[(j, i)]);
                let gap = (a - b).abs();
                if gap > SYMMETRY_TOL * a.abs().max(1.0) {
                    return Err(LinalgError::NotSymmetric { row: i, col: j, gap });
                }
            }
        }
        Ok(Self(m))
    }

    /// Wraps a matrix that is symmetric by construction, averaging away rounding.
    pub fn from_symmetric_unchecked(mut m: Matrix) -> Self {
        m.symmetrize();
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        Self(Matrix::from_diag(diag))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        self.0.matvec(v)
    }
}

impl Index<(usize, usize)> for SymPsdMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Orthonormal set of `k ≤ d` vectors in `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis {
    ambient: usize,
    vectors: Vec<Vec<f64>>,
}

impl OrthonormalBasis {
    pub fn new(ambient: usize, vectors: Vec<Vec<f64>>) -> Result<Self, LinalgError> {
        if vectors.len() > ambient {
            return Err(LinalgError::NotOrthonormal(format!("{} vectors in dimension {ambient}", vectors.len())));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != ambient {
                return Err(LinalgError::DimensionMismatch { expected: ambient, found: v.len() });
            }
            let n = norm(v);
            if (n - 1.0).abs() > ORTHONORMAL_TOL {
                return Err(LinalgError::NotOrthonormal(format!("vector {i} has norm {n}")));
            }
            for (j, u) in vectors.iter().enumerate().take(i) {
                let ip = dot(u, v);
                if ip.abs() > ORTHONORMAL_TOL {
                    return Err(LinalgError::NotOrthonormal(format!("<v{j}, v{i}> = {ip:e}")));
                }
            }
        }
        Ok(Self { ambient, vectors })
    }

    pub fn standard(ambient: usize, axes: &[usize]) -> Self {
        let vectors = axes
            .iter()
            .map(|&a| {
                let mut e = vec![0.0; ambient];
                e[a] = 1.0;
                e
            })
            .collect();
        Self { ambient, vectors }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Coordinates `Bᵀx` of `x` in this basis (rotation into `R^k`).
    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        self.vectors.iter().map(|v| dot(v, x)).collect()
    }

    /// `B·c`, the inverse of [`coords`](Self::coords) on the span.
    pub fn lift(&self, c: &[f64]) -> Vec<f64> {
        assert_eq!(c.len(), self.vectors.len());
        let mut out = vec![0.0; self.ambient];
        for (v, &ci) in self.vectors.iter().zip(c) {
            axpy(ci, v, &mut out);
        }
        out
    }

    /// Orthogonal projection onto the span.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.lift(&self.coords(x))
    }

    /// Euclidean distance from `x` to the span.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let p = self.project(x);
        x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    /// Whether `x` lies in the span up to `rel_tol · ‖x‖`.
    pub fn contains(&self, x: &[f64], rel_tol: f64) -> bool {
        self.distance(x) <= rel_tol * norm(x)
    }
}

/// Eigen-pairs of a symmetric matrix, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: OrthonormalBasis,
}

impl SymEigen {
    pub fn min_value(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn max_value(&self) -> f64 {
        self.values[0]
    }

    /// Rebuilds `Σ f(λ_i) v_i v_iᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SymPsdMatrix {
        let d = self.vectors.ambient_dim();
        let mut m = Matrix::zeros(d, d);
        for (lam, v) in self.values.iter().zip(self.vectors.vectors()) {
            let s = f(*lam);
            for i in 0..d {
                let svi = s * v[i];
                for j in 0..d {
                    m[(i, j)] += svi * v[j];
                }
            }
        }
        SymPsdMatrix::from_symmetric_unchecked(m)
    }
}

pub fn sym_eigendecomp(m: &SymPsdMatrix) -> Result<SymEigen, LinalgError> {
    sym_eigendecomp_with(m, JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)
}

/// Cyclic Jacobi eigendecomposition with explicit stopping parameters.
pub fn sym_eigendecomp_with(m: &SymPsdMatrix, rel_tol: f64, max_sweeps: usize) -> Result<SymEigen, LinalgError> {
    jacobi(m.matrix(), rel_tol, max_sweeps)
}

fn jacobi(m: &Matrix, rel_tol: f64, max_sweeps: usize) -> Result<SymEigen, LinalgError> {
    let n = m.rows;
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();
    let threshold = rel_tol * scale;

    let off_norm = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[(i, j)] * a[(i, j)];
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while scale > 0.0 && off_norm(&a) > threshold {
        if sweeps == max_sweeps {
            return Err(LinalgError::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Rotation angle chosen so that the updated a[p][q] vanishes.
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = order.iter().map(|&i| v.column(i)).collect();
    Ok(SymEigen { values, vectors: OrthonormalBasis { ambient: n, vectors } })
}

fn check_positive(eig: &SymEigen) -> Result<(), LinalgError> {
    let min = eig.min_value();
    let max = eig.max_value();
    if !(min > 0.0) || min <= SINGULAR_RTOL * max {
        return Err(LinalgError::SingularMatrix { min_eigenvalue: min });
    }
    Ok(())
}

/// `M^{-1/2}` for a positive definite `M`.
pub fn inv_sqrt_psd(m: &SymPsdMatrix) -> Result<SymPsdMatrix, LinalgError> {
    let eig = sym_eigendecomp(m)?;
    check_positive(&eig)?;
    Ok(eig.reconstruct_with(|l| 1.0 / l.sqrt()))
}

/// `M^{1/2}` for a positive semidefinite `M`; tiny negative eigenvalues are clamped.
pub fn sqrt_psd(m: &SymPsdMatrix) -> Result<SymPsdMatrix, LinalgError> {
    let eig = sym_eigendecomp(m)?;
    Ok(eig.reconstruct_with(|l| l.max(0.0).sqrt()))
}

/// `M^{-1}` for a positive definite `M`.
pub fn inv_psd(m: &SymPsdMatrix) -> Result<SymPsdMatrix, LinalgError> {
    let eig = sym_eigendecomp(m)?;
    check_positive(&eig)?;
    Ok(eig.reconstruct_with(|l| 1.0 / l))
}

/// Lower-triangular Cholesky factor `L` with `M = L·Lᵀ`.
pub fn cholesky(m: &SymPsdMatrix) -> Result<Matrix, LinalgError> {
    let n = m.dim();
    let a = m.matrix();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if !(diag > 0.0) {
            return Err(LinalgError::SingularMatrix { min_eigenvalue: diag });
        }
        let ljj = diag.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// `ln det M` for a positive definite `M`, via Cholesky.
pub fn log_det_spd(m: &SymPsdMatrix) -> Result<f64, LinalgError> {
    let l = cholesky(m)?;
    Ok((0..m.dim()).map(|i| 2.0 * l[(i, i)].ln()).sum())
}

/// Solves the lower-triangular system `L·x = b` in place.
pub fn forward_substitute(l: &Matrix, b: &mut [f64]) {
    let n = l.rows;
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * b[k];
        }
        b[i] = s / l[(i, i)];
    }
}

/// Solves a square system by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot falls below `pivot_tol` relative to the
/// largest entry of its column.
pub fn solve(a: &Matrix, b: &[f64], pivot_tol: f64) -> Option<Vec<f64>> {
    let n = a.rows;
    assert!(a.is_square() && b.len() == n);
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let scale = m.max_abs();
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let (piv, piv_val) =
            (col..n)
                .map(|r| (r, m[(r, col)].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_val <= pivot_tol * scale {
            return None;
        }
        if piv != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            rhs.swap(col, piv);
        }
        let p = m[(col, col)];
        for r in (col + 1)..n {
            let f = m[(r, col)] / p;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                let v = m[(col, j)];
                m[(r, j)] -= f * v;
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in (i + 1)..n {
            s -= m[(i, j)] * x[j];
        }
        x[i] = s / m[(i, i)];
    }
    Some(x)
}

/// Orthonormal basis of `V⊥` for `V = span(B)`.
///
/// Gram–Schmidt against the standard basis, each step picking the axis with
/// the largest residual after projecting out everything chosen so far.
pub fn orthonormal_complement(b: &OrthonormalBasis) -> Result<OrthonormalBasis, LinalgError> {
    let d = b.ambient;
    let k = b.dim();
    if k >= d {
        return Err(LinalgError::EmptyComplement);
    }
    let mut chosen: Vec<Vec<f64>> = b.vectors.clone();
    let mut added = Vec::with_capacity(d - k);
    for _ in 0..(d - k) {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for axis in 0..d {
            let mut r = vec![0.0; d];
            r[axis] = 1.0;
            // Two passes of modified Gram–Schmidt keep the result orthogonal to
            // working precision.
            for _ in 0..2 {
                for q in &chosen {
                    let c = dot(q, &r);
                    axpy(-c, q, &mut r);
                }
            }
            let n = norm(&r);
            if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
                best = Some((n, r));
            }
        }
        let (n, mut r) = best.expect("d > 0");
        r.iter_mut().for_each(|x| *x /= n);
        chosen.push(r.clone());
        added.push(r);
    }
    OrthonormalBasis::new(d, added)
}

/// Orthonormalizes a set of spanning vectors, dropping directions whose
/// residual falls below `rel_tol` of the original norm.
pub fn orthonormalize(ambient: usize, vectors: &[Vec<f64>], rel_tol: f64) -> OrthonormalBasis {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let n0 = norm(v);
        if n0 == 0.0 {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = dot(q, &r);
                axpy(-c, q, &mut r);
            }
        }
        let n = norm(&r);
        if n > rel_tol * n0 {
            r.iter_mut().for_each(|x| *x /= n);
            out.push(r);
        }
    }
    OrthonormalBasis { ambient, vectors: out }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha · x`.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Second-moment matrix `Σ w_i x_i x_iᵀ` (`weights = None` means all ones).
pub fn second_moment<R: AsRef<[f64]>>(points: &[R], dim: usize) -> Matrix {
    let mut m = Matrix::zeros(dim, dim);
    for p in points {
        let p = p.as_ref();
        for i in 0..dim {
            let pi = p[i];
            if pi == 0.0 {
                continue;
            }
            for j in i..dim {
                m[(i, j)] += pi * p[j];
            }
        }
    }
    for i in 0..dim {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(n: usize, rng: &mut ChaCha8Rng) -> SymPsdMatrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.random_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymPsdMatrix::new(m).unwrap()
    }

    fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> SymPsdMatrix {
        let g = Matrix::from_rows(
            &(0..n).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>()).collect::<Vec<_>>(),
        );
        let mut m = g.matmul(&g.transpose());
        for i in 0..n {
            m[(i, i)] += 0.5;
        }
        SymPsdMatrix::from_symmetric_unchecked(m)
    }

    fn det3(m: &Matrix) -> f64 {
        m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
            - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
            + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
    }

    /// Roots of det(M - λI) by bracketing sign changes on a fine grid and bisecting.
    fn char_poly_roots(m: &Matrix) -> Vec<f64> {
        let p = |lam: f64| {
            let mut s = m.clone();
            for i in 0..3 {
                s[(i, i)] -= lam;
            }
            det3(&s)
        };
        let bound = 1.0 + m.max_abs() * 3.0;
        let steps = 20_000;
        let mut roots = Vec::new();
        let h = 2.0 * bound / steps as f64;
        for k in 0..steps {
            let (mut lo, mut hi) = (-bound + k as f64 * h, -bound + (k + 1) as f64 * h);
            let (flo, fhi) = (p(lo), p(hi));
            if flo == 0.0 {
                roots.push(lo);
                continue;
            }
            if flo * fhi < 0.0 {
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if p(lo) * p(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
        }
        roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
        roots
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = sym_eigendecomp(&SymPsdMatrix::identity(3)).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_eigenpairs_sorted_descending() {
        let eig = sym_eigendecomp(&SymPsdMatrix::from_diag(&[2.0, 3.0])).unwrap();
        assert_eq!(eig.values, vec![3.0, 2.0]);
        let v = eig.vectors.vectors();
        assert!((v[0][1].abs() - 1.0).abs() < 1e-15 && v[0][0] == 0.0);
        assert!((v[1][0].abs() - 1.0).abs() < 1e-15 && v[1][1] == 0.0);
    }

    #[test]
    fn random_3x3_matches_characteristic_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let m = random_sym(3, &mut rng);
            let roots = char_poly_roots(m.matrix());
            assert_eq!(roots.len(), 3, "expected three distinct roots");
            let eig = sym_eigendecomp(&m).unwrap();
            for (a, b) in eig.values.iter().zip(&roots) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn residuals_within_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 5, 12, 30] {
            let m = random_sym(n, &mut rng);
            let eig = sym_eigendecomp(&m).unwrap();
            for (lam, v) in eig.values.iter().zip(eig.vectors.vectors()) {
                let mv = m.matvec(v);
                let r = norm(&sub(&mv, &v.iter().map(|x| lam * x).collect::<Vec<_>>()));
                assert!(r <= 1e-9 * (1.0 + lam.abs()));
            }
            assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn non_symmetric_rejected() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [2.5, 1.0]]);
        assert!(matches!(SymPsdMatrix::new(m), Err(LinalgError::NotSymmetric { .. })));
    }

    #[test]
    fn inv_sqrt_examples() {
        let a = inv_sqrt_psd(&SymPsdMatrix::identity(4)).unwrap();
        assert!(a.matrix().sub(&Matrix::identity(4)).max_abs() < 1e-15);
        let a = inv_sqrt_psd(&SymPsdMatrix::from_diag(&[4.0, 9.0])).unwrap();
        assert!((a[(0, 0)] - 0.5).abs() < 1e-15 && (a[(1, 1)] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(a[(0, 1)], 0.0);
    }

    #[test]
    fn inv_sqrt_multiply_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = random_spd(4, &mut rng);
            let a = inv_sqrt_psd(&m).unwrap();
            let ama = a.matrix().matmul(m.matrix()).matmul(a.matrix());
            assert!(ama.sub(&Matrix::identity(4)).sym_spectral_norm() <= 1e-9);
        }
    }

    #[test]
    fn inv_sqrt_rejects_singular_and_indefinite() {
        assert!(matches!(inv_sqrt_psd(&SymPsdMatrix::from_diag(&[1.0, 0.0])), Err(LinalgError::SingularMatrix { .. })));
        assert!(matches!(
            inv_sqrt_psd(&SymPsdMatrix::from_diag(&[1.0, -2.0])),
            Err(LinalgError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn complement_examples() {
        let c = orthonormal_complement(&OrthonormalBasis::standard(2, &[0])).unwrap();
        assert_eq!(c.vectors(), &[vec![0.0, 1.0]]);
        let c = orthonormal_complement(&OrthonormalBasis::standard(3, &[0, 1])).unwrap();
        assert_eq!(c.vectors(), &[vec![0.0, 0.0, 1.0]]);
        assert!(matches!(
            orthonormal_complement(&OrthonormalBasis::standard(2, &[0, 1])),
            Err(LinalgError::EmptyComplement)
        ));
    }

    #[test]
    fn complement_of_random_subspace_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let raw: Vec<Vec<f64>> = (0..2).map(|_| (0..5).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let b = orthonormalize(5, &raw, 1e-12);
        assert_eq!(b.dim(), 2);
        let c = orthonormal_complement(&b).unwrap();
        assert_eq!(c.dim(), 3);
        let all: Vec<Vec<f64>> = b.vectors().iter().chain(c.vectors()).cloned().collect();
        let gram = Matrix::from_rows(&all).matmul(&Matrix::from_columns(&all));
        assert!(gram.sub(&Matrix::identity(5)).max_abs() <= 1e-10);
        for u in b.vectors() {
            for v in c.vectors() {
                assert!(dot(u, v).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn cholesky_and_log_det() {
        let m = SymPsdMatrix::from_diag(&[4.0, 9.0, 1.0]);
        let l = cholesky(&m).unwrap();
        assert_eq!(l[(1, 1)], 3.0);
        assert!((log_det_spd(&m).unwrap() - 36f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 3.0]]);
        let x = solve(&a, &[3.0, 5.0], 1e-14).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
        let singular = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert!(solve(&singular, &[1.0, 1.0], 1e-12).is_none());
    }

    proptest! {
        #[test]
        fn reconstruction_reproduces_matrix(seed in 0u64..10_000, n in 1usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_sym(n, &mut rng);
            let eig = sym_eigendecomp(&m).unwrap();
            let back = eig.reconstruct_with(|l| l);
            prop_assert!(back.matrix().sub(m.matrix()).sym_spectral_norm() <= 1e-9);
        }

        #[test]
        fn inv_sqrt_twice_gives_identity(seed in 0u64..10_000, n in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_spd(n, &mut rng);
            let a = inv_sqrt_psd(&m).unwrap();
            let ama = a.matrix().matmul(m.matrix()).matmul(a.matrix());
            prop_assert!(ama.sub(&Matrix::identity(n)).max_abs() <= 1e-8);
        }

        #[test]
        fn projection_is_idempotent(seed in 0u64..10_000, d in 2usize..7, k in 1usize..6) {
            let k = k.min(d);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let raw: Vec<Vec<f64>> = (0..k).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            let b = orthonormalize(d, &raw, 1e-12);
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
            let p1 = b.project(&x);
            let p2 = b.project(&p1);
            for (a, c) in p1.iter().zip(&p2) {
                prop_assert!((a - c).abs() <= 1e-12);
            }
        }
    }
}
