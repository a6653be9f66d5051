//! Centers PCA for interval-valued triplets.
//!
//! The principal axes come from the weighted PCA of the interval midpoints.
//! Each individual is a hypercube in variable space; its component on an
//! axis is the exact range of the (linear) projection over that hypercube.
//! Variable coordinates use the transition formula evaluated in interval
//! arithmetic.

use thiserror::Error;

use crate::eigen::{self, EigenError, PcaResult};
use crate::exec::Exec;
use crate::interval::{Interval, IntervalError};
use crate::matrix::{IntervalMatrix, RealMatrix};

/// Largest column count accepted by [`vertex_projection_oracle`].
pub const ORACLE_MAX_COLUMNS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CpcaError {
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error("requested {requested} axes but the data has only {available} variables")]
    TooManyAxes { requested: usize, available: usize },
    #[error("vertex enumeration needs at most {max} columns, got {actual}")]
    TooManyColumns { max: usize, actual: usize },
    #[error("index out of range: {what} {index} (size {size})")]
    OutOfRange { what: &'static str, index: usize, size: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalPcaResult {
    pub eigenvalues: Vec<f64>,
    pub axes: RealMatrix,
    pub first_eigenvalue: f64,
    pub first_eigenvector: Vec<f64>,
    /// `n × n_axes` interval principal components.
    pub row_components: IntervalMatrix,
    /// `p × n_axes` interval variable coordinates.
    pub var_coords: IntervalMatrix,
    pub rank_deficient: Vec<bool>,
    /// The classic PCA of the midpoints the axes come from.
    pub centers: PcaResult,
}

impl IntervalPcaResult {
    pub fn n_axes(&self) -> usize {
        self.row_components.n_cols()
    }

    /// Reverses the orientation of axis `k` in every field.
    pub fn flip_axis(&mut self, k: usize) {
        self.centers.flip_axis(k);
        for j in 0..self.axes.n_rows() {
            self.axes[(j, k)] = -self.axes[(j, k)];
        }
        if k == 0 {
            for u in &mut self.first_eigenvector {
                *u = -*u;
            }
        }
        if k < self.n_axes() {
            for i in 0..self.row_components.n_rows() {
                self.row_components[(i, k)] = -self.row_components[(i, k)];
            }
            for j in 0..self.var_coords.n_rows() {
                self.var_coords[(j, k)] = -self.var_coords[(j, k)];
            }
        }
    }
}

pub fn cpca(
    x: &IntervalMatrix,
    metric: &[f64],
    weights: &[f64],
    n_axes: usize,
) -> Result<IntervalPcaResult, CpcaError> {
    cpca_with(x, metric, weights, n_axes, Exec::default())
}

pub fn cpca_with(
    x: &IntervalMatrix,
    metric: &[f64],
    weights: &[f64],
    n_axes: usize,
    exec: Exec,
) -> Result<IntervalPcaResult, CpcaError> {
    let (n, p) = x.shape();
    if n_axes > p {
        return Err(CpcaError::TooManyAxes { requested: n_axes, available: p });
    }
    let centers = eigen::pca_triplet(&x.centers(), metric, weights)?;
    let axes = centers.axes.clone();

    // projection coefficients m_j · a_jk
    let coef = RealMatrix::from_fn(p, n_axes, |j, k| metric[j] * axes[(j, k)]);

    let rows = exec.try_map_range(n, |i| {
        let cells = x.row(i);
        (0..n_axes)
            .map(|k| {
                let (mut lo, mut hi) = (0.0, 0.0);
                for (j, cell) in cells.iter().enumerate() {
                    let c = coef[(j, k)];
                    let (a, b) = (cell.lo() * c, cell.hi() * c);
                    lo += a.min(b);
                    hi += a.max(b);
                }
                Interval::new(lo, hi)
            })
            .collect::<Result<Vec<_>, IntervalError>>()
    })?;
    let row_components = IntervalMatrix::new(n, n_axes, rows.concat()).expect("shape by construction");

    let scores = &centers.row_scores;
    let vars = exec.try_map_range(p, |j| {
        let root = metric[j].sqrt();
        (0..n_axes)
            .map(|k| {
                if centers.rank_deficient[k] {
                    return Ok(Interval::ZERO);
                }
                let mut acc = Interval::ZERO;
                for i in 0..n {
                    let term = x[(i, j)].checked_mul(Interval::point(scores[(i, k)]))?.checked_scale(weights[i])?;
                    acc = acc.checked_add(term)?;
                }
                acc.checked_scale(root / centers.eigenvalues[k].sqrt())
            })
            .collect::<Result<Vec<_>, IntervalError>>()
    })?;
    let var_coords = IntervalMatrix::new(p, n_axes, vars.concat()).expect("shape by construction");

    Ok(IntervalPcaResult {
        eigenvalues: centers.eigenvalues.clone(),
        first_eigenvalue: centers.eigenvalues.first().copied().unwrap_or(0.0),
        first_eigenvector: centers.first_eigenvector(),
        axes,
        row_components,
        var_coords,
        rank_deficient: centers.rank_deficient.clone(),
        centers,
    })
}

/// Range of the projection of `row`'s hypercube on `axis`, by enumerating
/// all `2^p` vertices.
pub fn vertex_projection_oracle(
    x: &IntervalMatrix,
    axes: &RealMatrix,
    metric: &[f64],
    row: usize,
    axis: usize,
) -> Result<Interval, CpcaError> {
    let (n, p) = x.shape();
    if p > ORACLE_MAX_COLUMNS {
        return Err(CpcaError::TooManyColumns { max: ORACLE_MAX_COLUMNS, actual: p });
    }
    if row >= n {
        return Err(CpcaError::OutOfRange { what: "row", index: row, size: n });
    }
    if axis >= axes.n_cols() {
        return Err(CpcaError::OutOfRange { what: "axis", index: axis, size: axes.n_cols() });
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for mask in 0u32..(1u32 << p) {
        let mut proj = 0.0;
        for j in 0..p {
            let cell = x[(row, j)];
            let v = if mask & (1 << j) == 0 { cell.lo() } else { cell.hi() };
            proj += v * metric[j] * axes[(j, axis)];
        }
        lo = lo.min(proj);
        hi = hi.max(proj);
    }
    Ok(Interval::new(lo, hi)?)
}
