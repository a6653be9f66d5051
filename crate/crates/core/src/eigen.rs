//! Symmetric eigendecomposition (cyclic Jacobi) and the weighted PCA of a
//! triplet `(X, M, D)`: data matrix, diagonal column metric, diagonal row
//! weights.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::RealMatrix;

/// Default relative off-diagonal tolerance for [`jacobi_eigen`].
pub const DEFAULT_TOL: f64 = 1e-14;
pub const MAX_SWEEPS: usize = 100;
/// Eigenvalues below this fraction of the largest are treated as zero.
pub const RANK_TOL: f64 = 1e-12;

const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: entries ({row}, {col}) differ by {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("metric entry {index} must be positive and finite, got {value}")]
    Metric { index: usize, value: f64 },
    #[error("row weight {index} must be positive and finite, got {value}")]
    Weight { index: usize, value: f64 },
    #[error("row weights must sum to 1, got {sum}")]
    WeightSum { sum: f64 },
    #[error("{what}: expected length {expected}, got {actual}")]
    Length { what: &'static str, expected: usize, actual: usize },
    #[error("column {column} has zero variance")]
    ZeroVariance { column: usize },
}

/// Full spectrum of a real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Column `j` is the unit eigenvector for `values[j]`; its entry of
    /// largest magnitude is positive.
    pub vectors: RealMatrix,
}

/// Eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps over all off-diagonal pairs until the off-diagonal Frobenius norm
/// falls to `tol · ‖a‖_F`.
pub fn jacobi_eigen(a: &RealMatrix, tol: f64) -> Result<SymEigen, EigenError> {
    let (rows, cols) = a.shape();
    if rows != cols {
        return Err(EigenError::NotSquare { rows, cols });
    }
    let n = rows;
    let scale = a.max_abs().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (a[(i, j)] - a[(j, i)]).abs();
            if gap > SYMMETRY_TOL * scale {
                return Err(EigenError::NotSymmetric { row: i, col: j, gap });
            }
        }
    }

    // work on the exactly symmetrised copy
    let mut m = RealMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut v = RealMatrix::identity(n);
    let target = tol * m.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&m);
        if off > target {
            return Err(EigenError::NoConvergence { sweeps: MAX_SWEEPS, off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]));
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = RealMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    for k in 0..n {
        let mut lead = 0;
        for i in 1..n {
            if vectors[(i, k)].abs() > vectors[(lead, k)].abs() {
                lead = i;
            }
        }
        if vectors[(lead, k)] < 0.0 {
            for i in 0..n {
                vectors[(i, k)] = -vectors[(i, k)];
            }
        }
    }
    Ok(SymEigen { values, vectors })
}

fn off_diagonal_norm(m: &RealMatrix) -> f64 {
    let n = m.n_rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s.sqrt()
}

// One symmetric Schur rotation annihilating m[p][q].
fn rotate(m: &mut RealMatrix, v: &mut RealMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    if apq == 0.0 {
        return;
    }
    let n = m.n_rows();
    let tau = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
    let t = if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    for k in 0..n {
        let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = c * mkp - s * mkq;
        m[(k, q)] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = c * mpk - s * mqk;
        m[(q, k)] = s * mpk + c * mqk;
    }
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Result of a weighted PCA of a real triplet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaResult {
    /// Descending, with values below `RANK_TOL · λ_max` clamped to zero.
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors of `M^{1/2} V M^{1/2}`, one per column.
    pub eigenvectors: RealMatrix,
    /// Principal axes in variable space (`M`-orthonormal columns).
    pub axes: RealMatrix,
    /// Principal components of the rows, `X · M · axes`.
    pub row_scores: RealMatrix,
    /// Variable coordinates `√λ_k · axes_jk · √m_j`.
    pub var_coords: RealMatrix,
    /// `true` for axes whose eigenvalue was clamped to zero.
    pub rank_deficient: Vec<bool>,
}

impl PcaResult {
    /// Reverses the orientation of axis `k` everywhere it appears.
    pub fn flip_axis(&mut self, k: usize) {
        for m in [&mut self.eigenvectors, &mut self.axes, &mut self.var_coords] {
            for j in 0..m.n_rows() {
                m[(j, k)] = -m[(j, k)];
            }
        }
        for i in 0..self.row_scores.n_rows() {
            self.row_scores[(i, k)] = -self.row_scores[(i, k)];
        }
    }

    pub fn first_eigenvector(&self) -> Vec<f64> {
        self.eigenvectors.column(0)
    }
}

pub(crate) fn check_metric(metric: &[f64], expected: usize) -> Result<(), EigenError> {
    if metric.len() != expected {
        return Err(EigenError::Length { what: "metric", expected, actual: metric.len() });
    }
    if let Some((index, &value)) = metric.iter().enumerate().find(|(_, m)| !(m.is_finite() && **m > 0.0)) {
        return Err(EigenError::Metric { index, value });
    }
    Ok(())
}

pub(crate) fn check_weights(weights: &[f64], expected: usize) -> Result<(), EigenError> {
    if weights.len() != expected {
        return Err(EigenError::Length { what: "row weights", expected, actual: weights.len() });
    }
    if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
        return Err(EigenError::Weight { index, value });
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(EigenError::WeightSum { sum });
    }
    Ok(())
}

pub fn uniform_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Weighted PCA of `(x, diag(metric), diag(weights))`.
///
/// Diagonalises `M^{1/2} Xᵀ D X M^{1/2}` and maps its eigenvectors back to
/// axes by `M^{-1/2}`. `x` is used as given (no centering).
pub fn pca_triplet(x: &RealMatrix, metric: &[f64], weights: &[f64]) -> Result<PcaResult, EigenError> {
    let (n, p) = x.shape();
    check_metric(metric, p)?;
    check_weights(weights, n)?;

    let root: Vec<f64> = metric.iter().map(|m| m.sqrt()).collect();
    let mut s = RealMatrix::zeros(p, p);
    for a in 0..p {
        for b in a..p {
            let mut acc = 0.0;
            for i in 0..n {
                acc += weights[i] * x[(i, a)] * x[(i, b)];
            }
            let v = root[a] * acc * root[b];
            s[(a, b)] = v;
            s[(b, a)] = v;
        }
    }
    let eig = jacobi_eigen(&s, DEFAULT_TOL)?;

    let lambda_max = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let mut rank_deficient = vec![false; p];
    let eigenvalues: Vec<f64> = eig
        .values
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            if lambda_max == 0.0 || l < RANK_TOL * lambda_max {
                rank_deficient[k] = true;
                0.0
            } else {
                l
            }
        })
        .collect();

    let axes = RealMatrix::from_fn(p, p, |j, k| eig.vectors[(j, k)] / root[j]);
    let row_scores = RealMatrix::from_fn(n, p, |i, k| {
        let mut acc = 0.0;
        for j in 0..p {
            acc += x[(i, j)] * (metric[j] * axes[(j, k)]);
        }
        acc
    });
    let var_coords = RealMatrix::from_fn(p, p, |j, k| eigenvalues[k].sqrt() * axes[(j, k)] * root[j]);

    Ok(PcaResult { eigenvalues, eigenvectors: eig.vectors, axes, row_scores, var_coords, rank_deficient })
}

/// Diagonal metric `1/σ_j²` with `σ_j` the weighted population standard
/// deviation of column `j`.
pub fn inverse_variance_metric(x: &RealMatrix, weights: &[f64]) -> Result<Vec<f64>, EigenError> {
    let (n, p) = x.shape();
    check_weights(weights, n)?;
    let scale = x.max_abs();
    (0..p)
        .map(|j| {
            let mean: f64 = (0..n).map(|i| weights[i] * x[(i, j)]).sum();
            let var: f64 = (0..n).map(|i| weights[i] * (x[(i, j)] - mean).powi(2)).sum();
            let sd = var.sqrt();
            if !(sd > 0.0) || sd <= 1e-12 * scale {
                Err(EigenError::ZeroVariance { column: j })
            } else {
                Ok(1.0 / var)
            }
        })
        .collect()
}
