//! Dense real and interval matrices.
//!
//! Both types store cells row-major. Interval products follow the ordinary
//! matrix product with every scalar `×` and `+` replaced by its interval
//! counterpart, summing in ascending index order.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::interval::{Interval, IntervalError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("{op}: dimension mismatch ({}x{} vs {}x{})", .left.0, .left.1, .right.0, .right.1)]
    DimensionMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("expected {expected} cells for the declared shape, got {actual}")]
    CellCount { expected: usize, actual: usize },
    #[error("{op}: empty input")]
    Empty { op: &'static str },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("column {column} has zero spread")]
    ZeroSpread { column: usize },
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

type Result<T> = std::result::Result<T, LinalgError>;

/// A dense matrix of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LinalgError::CellCount { expected: rows * cols, actual: data.len() });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(RealMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RealMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from nested rows; panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let p = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n * p);
        for r in rows {
            assert_eq!(r.as_ref().len(), p, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        RealMatrix { rows: n, cols: p, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RealMatrix { rows, cols, data }
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = RealMatrix::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> RealMatrix {
        RealMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &RealMatrix) -> Result<RealMatrix> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch { op: "matmul", left: self.shape(), right: rhs.shape() });
        }
        let mut out = RealMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut s = 0.0;
                for k in 0..self.cols {
                    s += self[(i, k)] * rhs[(k, j)];
                }
                out[(i, j)] = s;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> RealMatrix {
        RealMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| c * x).collect() }
    }

    pub fn add(&self, rhs: &RealMatrix) -> Result<RealMatrix> {
        if self.shape() != rhs.shape() {
            return Err(LinalgError::DimensionMismatch { op: "add", left: self.shape(), right: rhs.shape() });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(RealMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn hconcat(blocks: &[RealMatrix]) -> Result<RealMatrix> {
        let first = blocks.first().ok_or(LinalgError::Empty { op: "hconcat" })?;
        let rows = first.rows;
        for b in blocks {
            if b.rows != rows {
                return Err(LinalgError::DimensionMismatch { op: "hconcat", left: first.shape(), right: b.shape() });
            }
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(i));
            }
        }
        Ok(RealMatrix { rows, cols, data })
    }

    pub fn vstack(blocks: &[RealMatrix]) -> Result<RealMatrix> {
        let first = blocks.first().ok_or(LinalgError::Empty { op: "vstack" })?;
        let cols = first.cols;
        let mut data = Vec::new();
        for b in blocks {
            if b.cols != cols {
                return Err(LinalgError::DimensionMismatch { op: "vstack", left: first.shape(), right: b.shape() });
            }
            data.extend_from_slice(&b.data);
        }
        Ok(RealMatrix { rows: data.len() / cols.max(1), cols, data })
    }

    /// Subtracts the arithmetic mean of every column.
    pub fn center_columns(&self) -> RealMatrix {
        let n = self.rows as f64;
        let means: Vec<f64> = (0..self.cols).map(|j| (0..self.rows).map(|i| self[(i, j)]).sum::<f64>() / n).collect();
        RealMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - means[j])
    }

    /// Rows concatenated into one `n²×1` column.
    pub fn vectorize(&self) -> RealMatrix {
        RealMatrix { rows: self.data.len(), cols: 1, data: self.data.clone() }
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// A dense matrix of intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawIntervalMatrix")]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

#[derive(Deserialize)]
struct RawIntervalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

impl TryFrom<RawIntervalMatrix> for IntervalMatrix {
    type Error = LinalgError;

    fn try_from(raw: RawIntervalMatrix) -> Result<Self> {
        IntervalMatrix::new(raw.rows, raw.cols, raw.data)
    }
}

impl IntervalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Interval>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LinalgError::CellCount { expected: rows * cols, actual: data.len() });
        }
        Ok(IntervalMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntervalMatrix { rows, cols, data: vec![Interval::ZERO; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Interval) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntervalMatrix { rows, cols, data }
    }

    /// Builds a matrix from separate lower and upper endpoint matrices.
    pub fn from_bounds(lower: &RealMatrix, upper: &RealMatrix) -> Result<Self> {
        if lower.shape() != upper.shape() {
            return Err(LinalgError::DimensionMismatch {
                op: "from_bounds",
                left: lower.shape(),
                right: upper.shape(),
            });
        }
        let data = lower
            .as_slice()
            .iter()
            .zip(upper.as_slice())
            .map(|(&lo, &hi)| Interval::new(lo, hi))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(IntervalMatrix { rows: lower.n_rows(), cols: lower.n_cols(), data })
    }

    /// Every cell becomes the degenerate interval `[a_ij, a_ij]`.
    pub fn embed_classic(a: &RealMatrix) -> Self {
        IntervalMatrix {
            rows: a.n_rows(),
            cols: a.n_cols(),
            data: a.as_slice().iter().map(|&x| Interval::point(x)).collect(),
        }
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Interval] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Interval> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> IntervalMatrix {
        IntervalMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &IntervalMatrix) -> Result<IntervalMatrix> {
        self.matmul_with(rhs, Exec::default())
    }

    /// Interval matrix product; output rows are computed independently.
    pub fn matmul_with(&self, rhs: &IntervalMatrix, exec: Exec) -> Result<IntervalMatrix> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch { op: "matmul", left: self.shape(), right: rhs.shape() });
        }
        let rows = exec.try_map_range(self.rows, |i| {
            let a = self.row(i);
            (0..rhs.cols)
                .map(|j| {
                    a.iter()
                        .enumerate()
                        .try_fold(Interval::ZERO, |acc, (k, x)| acc.checked_add(x.checked_mul(rhs[(k, j)])?))
                })
                .collect::<std::result::Result<Vec<_>, IntervalError>>()
        })?;
        Ok(IntervalMatrix { rows: self.rows, cols: rhs.cols, data: rows.concat() })
    }

    /// Row-major vectorization into an `(rows·cols)×1` column.
    pub fn vectorize(&self) -> IntervalMatrix {
        IntervalMatrix { rows: self.data.len(), cols: 1, data: self.data.clone() }
    }

    /// Inverse of [`IntervalMatrix::vectorize`] for an `n²×1` column.
    pub fn devectorize(&self, n: usize) -> Result<IntervalMatrix> {
        if self.cols != 1 || self.rows != n * n {
            return Err(LinalgError::DimensionMismatch { op: "devectorize", left: self.shape(), right: (n * n, 1) });
        }
        Ok(IntervalMatrix { rows: n, cols: n, data: self.data.clone() })
    }

    /// Replaces every cell by `x_ij − mean_j`, where `mean_j` is the
    /// endpoint-wise mean of column `j`, using interval subtraction.
    pub fn center_columns(&self) -> Result<IntervalMatrix> {
        let means = (0..self.cols).map(|j| column_mean(&self.column(j))).collect::<Result<Vec<_>>>()?;
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(idx, x)| x.checked_sub(means[idx % self.cols]))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(IntervalMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// Divides every column by the population standard deviation of its
    /// centers, shrinking interval widths on high-spread variables.
    pub fn normalize_widths(&self) -> Result<IntervalMatrix> {
        let centers = self.centers();
        let n = self.rows as f64;
        let mut out = self.clone();
        for j in 0..self.cols {
            let col = centers.column(j);
            let mean = col.iter().sum::<f64>() / n;
            let sd = (col.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / n).sqrt();
            if !(sd > 0.0) {
                return Err(LinalgError::ZeroSpread { column: j });
            }
            for i in 0..self.rows {
                out[(i, j)] = self[(i, j)].checked_scale(1.0 / sd)?;
            }
        }
        Ok(out)
    }

    pub fn centers(&self) -> RealMatrix {
        RealMatrix::new(self.rows, self.cols, self.data.iter().map(Interval::midpoint).collect())
            .expect("midpoints of finite intervals are finite")
    }

    pub fn radii(&self) -> RealMatrix {
        RealMatrix::new(self.rows, self.cols, self.data.iter().map(Interval::radius).collect())
            .expect("radii of finite intervals are finite")
    }

    pub fn lower(&self) -> RealMatrix {
        RealMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].lo())
    }

    pub fn upper(&self) -> RealMatrix {
        RealMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].hi())
    }

    /// Multiplies every cell by the real `beta`.
    pub fn scale_block(&self, beta: f64) -> Result<IntervalMatrix> {
        let data = self.data.iter().map(|x| x.checked_scale(beta)).collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(IntervalMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn checked_add(&self, rhs: &IntervalMatrix) -> Result<IntervalMatrix> {
        if self.shape() != rhs.shape() {
            return Err(LinalgError::DimensionMismatch { op: "add", left: self.shape(), right: rhs.shape() });
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.checked_add(*b))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(IntervalMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn hconcat(blocks: &[IntervalMatrix]) -> Result<IntervalMatrix> {
        let first = blocks.first().ok_or(LinalgError::Empty { op: "hconcat" })?;
        let rows = first.rows;
        for b in blocks {
            if b.rows != rows {
                return Err(LinalgError::DimensionMismatch { op: "hconcat", left: first.shape(), right: b.shape() });
            }
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(i));
            }
        }
        Ok(IntervalMatrix { rows, cols, data })
    }

    pub fn vstack(blocks: &[IntervalMatrix]) -> Result<IntervalMatrix> {
        let first = blocks.first().ok_or(LinalgError::Empty { op: "vstack" })?;
        let cols = first.cols;
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(LinalgError::DimensionMismatch { op: "vstack", left: first.shape(), right: b.shape() });
            }
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Ok(IntervalMatrix { rows, cols, data })
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> IntervalMatrix {
        IntervalMatrix {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }

    pub fn is_degenerate(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.is_degenerate(tol))
    }

    /// Cellwise `self ⊆ other` with endpoint slack `tol`.
    pub fn is_subset_of(&self, other: &IntervalMatrix, tol: f64) -> bool {
        self.shape() == other.shape() && self.data.iter().zip(&other.data).all(|(a, b)| a.is_subset_of(b, tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.lo().abs()).max(x.hi().abs()))
    }
}

impl Index<(usize, usize)> for IntervalMatrix {
    type Output = Interval;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Interval {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntervalMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Interval {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntervalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Endpoint-wise arithmetic mean `[Σ lo / n, Σ hi / n]`.
pub fn column_mean(col: &[Interval]) -> Result<Interval> {
    if col.is_empty() {
        return Err(LinalgError::Empty { op: "column_mean" });
    }
    let n = col.len() as f64;
    let lo = col.iter().map(Interval::lo).sum::<f64>() / n;
    let hi = col.iter().map(Interval::hi).sum::<f64>() / n;
    Ok(Interval::new(lo, hi)?)
}

/// Interval dot product `Σ a_i × b_i`, summed in index order.
pub fn dot(a: &[Interval], b: &[Interval]) -> Result<Interval> {
    if a.len() != b.len() {
        return Err(LinalgError::DimensionMismatch { op: "dot", left: (a.len(), 1), right: (b.len(), 1) });
    }
    Ok(a.iter().zip(b).try_fold(Interval::ZERO, |acc, (x, y)| acc.checked_add(x.checked_mul(*y)?))?)
}

/// `trace(W_i × W_j)` in interval arithmetic.
pub fn trace_inner_product(wi: &IntervalMatrix, wj: &IntervalMatrix) -> Result<Interval> {
    let n = wi.n_rows();
    if wi.shape() != (n, n) || wj.shape() != (n, n) {
        return Err(LinalgError::DimensionMismatch { op: "trace_inner_product", left: wi.shape(), right: wj.shape() });
    }
    let mut acc = Interval::ZERO;
    for i in 0..n {
        for k in 0..n {
            acc = acc.checked_add(wi[(i, k)].checked_mul(wj[(k, i)])?)?;
        }
    }
    Ok(acc)
}

/// `a ≡ y`: every cell of `y` is degenerate at the matching entry of `a`,
/// within `tol` on both endpoints.
pub fn is_equivalent(a: &RealMatrix, y: &IntervalMatrix, tol: f64) -> Result<bool> {
    if a.shape() != y.shape() {
        return Err(LinalgError::DimensionMismatch { op: "is_equivalent", left: a.shape(), right: y.shape() });
    }
    Ok(a.as_slice().iter().zip(y.as_slice()).all(|(x, c)| (c.lo() - x).abs() <= tol && (c.hi() - x).abs() <= tol))
}

/// Largest endpoint deviation between `a` and `y` read as degenerate.
pub fn equivalence_gap(a: &RealMatrix, y: &IntervalMatrix) -> f64 {
    assert_eq!(a.shape(), y.shape());
    a.as_slice().iter().zip(y.as_slice()).fold(0.0, |m, (x, c)| m.max((c.lo() - x).abs()).max((c.hi() - x).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn random_interval_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> IntervalMatrix {
        IntervalMatrix::from_fn(rows, cols, |_, _| {
            let c: f64 = rng.gen_range(-3.0..3.0);
            let r: f64 = rng.gen_range(0.0..1.0);
            iv(c - r, c + r)
        })
    }

    fn sample_point(rng: &mut ChaCha8Rng, m: &IntervalMatrix) -> RealMatrix {
        RealMatrix::from_fn(m.n_rows(), m.n_cols(), |i, j| {
            let c = m[(i, j)];
            (c.lo() + rng.gen::<f64>() * c.width()).clamp(c.lo(), c.hi())
        })
    }

    #[test]
    fn matmul_one_by_one() {
        let a = IntervalMatrix::new(1, 1, vec![iv(1.0, 2.0)]).unwrap();
        let b = IntervalMatrix::new(1, 1, vec![iv(3.0, 4.0)]).unwrap();
        assert_eq!(a.matmul(&b).unwrap()[(0, 0)], iv(3.0, 8.0));
    }

    #[test]
    fn matmul_shape_error() {
        let a = IntervalMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(LinalgError::DimensionMismatch { .. })));
    }

    #[test]
    fn matmul_encloses_point_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_interval_matrix(&mut rng, 2, 2);
        let b = random_interval_matrix(&mut rng, 2, 2);
        let ab = a.matmul(&b).unwrap();
        for _ in 0..200 {
            let p = sample_point(&mut rng, &a).matmul(&sample_point(&mut rng, &b)).unwrap();
            assert!(IntervalMatrix::embed_classic(&p).is_subset_of(&ab, 1e-12));
        }
    }

    #[test]
    fn matmul_sequential_and_parallel_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_interval_matrix(&mut rng, 17, 9);
        let b = random_interval_matrix(&mut rng, 9, 13);
        assert_eq!(a.matmul_with(&b, Exec::Sequential).unwrap(), a.matmul_with(&b, Exec::Parallel).unwrap());
    }

    #[test]
    fn transpose_and_vectorize() {
        let m = IntervalMatrix::new(2, 2, vec![iv(0.0, 1.0), iv(1.0, 2.0), iv(2.0, 3.0), iv(3.0, 4.0)]).unwrap();
        assert_eq!(m.transpose().transpose(), m);
        assert_eq!(m.transpose()[(0, 1)], iv(2.0, 3.0));
        let v = m.vectorize();
        assert_eq!(v.shape(), (4, 1));
        assert_eq!(v.column(0), m.as_slice().to_vec());
        assert_eq!(v.devectorize(2).unwrap(), m);
        let row = IntervalMatrix::zeros(1, 5);
        assert_eq!(row.transpose().shape(), (5, 1));
        let one = IntervalMatrix::new(1, 1, vec![iv(1.0, 2.0)]).unwrap();
        assert_eq!(one.vectorize(), one);
    }

    #[test]
    fn column_mean_examples() {
        assert_eq!(column_mean(&[iv(0.0, 2.0), iv(2.0, 4.0)]).unwrap(), iv(1.0, 3.0));
        assert_eq!(column_mean(&[iv(7.5, 7.5)]).unwrap(), iv(7.5, 7.5));
        assert_eq!(column_mean(&[iv(0.0, 1.0); 3]).unwrap(), iv(0.0, 1.0));
        assert!(matches!(column_mean(&[]), Err(LinalgError::Empty { .. })));
    }

    #[test]
    fn center_columns_examples() {
        let m = IntervalMatrix::new(2, 1, vec![iv(0.0, 2.0), iv(2.0, 4.0)]).unwrap();
        let c = m.center_columns().unwrap();
        // [0,2] − [1,3] = [0−3, 2−1]; [2,4] − [1,3] = [2−3, 4−1]
        assert_eq!(c.column(0), vec![iv(-3.0, 1.0), iv(-1.0, 3.0)]);

        let constant = IntervalMatrix::embed_classic(&RealMatrix::from_rows(&[[4.0], [4.0], [4.0]]));
        assert!(is_equivalent(&RealMatrix::zeros(3, 1), &constant.center_columns().unwrap(), 0.0).unwrap());
    }

    #[test]
    fn center_columns_degenerate_sums_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = RealMatrix::from_fn(7, 4, |_, _| rng.gen_range(-5.0..5.0));
        let c = IntervalMatrix::embed_classic(&a).center_columns().unwrap();
        assert!(c.is_degenerate(0.0));
        for j in 0..4 {
            let s: f64 = c.column(j).iter().map(Interval::lo).sum();
            assert!(s.abs() < 1e-10);
        }
        assert!(is_equivalent(&a.center_columns(), &c, 1e-12).unwrap());
    }

    #[test]
    fn trace_inner_product_examples() {
        let i2 = IntervalMatrix::embed_classic(&RealMatrix::identity(2));
        assert_eq!(trace_inner_product(&i2, &i2).unwrap(), iv(2.0, 2.0));

        let a = RealMatrix::from_rows(&[[2.0, 1.0], [1.0, 3.0]]);
        let b = RealMatrix::from_rows(&[[1.0, -1.0], [-1.0, 4.0]]);
        let t = trace_inner_product(&IntervalMatrix::embed_classic(&a), &IntervalMatrix::embed_classic(&b)).unwrap();
        assert_eq!(t, Interval::point(a.matmul(&b).unwrap().trace()));
    }

    #[test]
    fn trace_inner_product_is_vectorized_dot() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let wi = random_interval_matrix(&mut rng, 3, 3);
        let wj = random_interval_matrix(&mut rng, 3, 3);
        let t = trace_inner_product(&wi, &wj).unwrap();
        let d = dot(wi.vectorize().as_slice(), wj.transpose().vectorize().as_slice()).unwrap();
        assert_eq!(t, d);
        for _ in 0..200 {
            let p = sample_point(&mut rng, &wi).matmul(&sample_point(&mut rng, &wj)).unwrap().trace();
            assert!(t.lo() - 1e-12 <= p && p <= t.hi() + 1e-12);
        }
    }

    #[test]
    fn gram_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = random_interval_matrix(&mut rng, 6, 4);
        let w = x.matmul(&x.transpose()).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert!((w[(i, j)].lo() - w[(j, i)].lo()).abs() <= 1e-12);
                assert!((w[(i, j)].hi() - w[(j, i)].hi()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn centers_and_radii() {
        let m = IntervalMatrix::new(1, 1, vec![iv(0.0, 2.0)]).unwrap();
        assert_eq!(m.centers(), RealMatrix::from_rows(&[[1.0]]));
        assert_eq!(m.radii(), RealMatrix::from_rows(&[[1.0]]));
        let a = RealMatrix::from_rows(&[[1.0, -2.0], [0.5, 3.0]]);
        let e = IntervalMatrix::embed_classic(&a);
        assert_eq!(e.centers(), a);
        assert_eq!(e.radii(), RealMatrix::zeros(2, 2));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = random_interval_matrix(&mut rng, 3, 3);
        let (c, h) = (r.centers(), r.radii());
        for i in 0..3 {
            for j in 0..3 {
                assert!((c[(i, j)] - h[(i, j)] - r[(i, j)].lo()).abs() < 1e-14);
                assert!((c[(i, j)] + h[(i, j)] - r[(i, j)].hi()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn block_assembly() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random_interval_matrix(&mut rng, 3, 2);
        assert_eq!(IntervalMatrix::hconcat(std::slice::from_ref(&x)).unwrap(), x);
        let y = random_interval_matrix(&mut rng, 3, 4);
        let h = IntervalMatrix::hconcat(&[x.clone(), y.clone()]).unwrap();
        assert_eq!(h.shape(), (3, 6));
        assert_eq!(h[(1, 3)], y[(1, 1)]);
        let sq = random_interval_matrix(&mut rng, 3, 3);
        let v = IntervalMatrix::vstack(&[sq.clone(), sq.clone(), sq.clone(), sq.clone()]).unwrap();
        assert_eq!(v.shape(), (12, 3));
        assert_eq!(v.row_block(6, 9), sq);
        assert_eq!(x.scale_block(1.0).unwrap(), x);
        assert!(IntervalMatrix::hconcat(&[x.clone(), sq.transpose().row_block(0, 2)]).is_err());
        assert!(IntervalMatrix::vstack(&[x, y]).is_err());
    }

    #[test]
    fn equivalence() {
        let a = RealMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        let e = IntervalMatrix::embed_classic(&a);
        assert!(is_equivalent(&a, &e, 0.0).unwrap());
        let mut wide = e.clone();
        wide[(1, 0)] = iv(3.0, 3.5);
        assert!(!is_equivalent(&a, &wide, 0.0).unwrap());
        let mut nudged = e.clone();
        nudged[(0, 1)] = iv(2.0 - 1e-10, 2.0 + 1e-10);
        assert!(is_equivalent(&a, &nudged, 1e-9).unwrap());
        assert!(is_equivalent(&a, &IntervalMatrix::zeros(2, 3), 0.0).is_err());
    }

    #[test]
    fn normalize_widths_scales_by_center_spread() {
        let m = IntervalMatrix::new(2, 1, vec![iv(-2.0, 0.0), iv(0.0, 2.0)]).unwrap();
        let n = m.normalize_widths().unwrap();
        // centers -1, 1 -> population sd 1
        assert_eq!(n, m);
        let flat = IntervalMatrix::new(2, 1, vec![iv(0.0, 2.0), iv(0.0, 2.0)]).unwrap();
        assert!(matches!(flat.normalize_widths(), Err(LinalgError::ZeroSpread { column: 0 })));
    }

    #[test]
    fn serde_layout() {
        let m = IntervalMatrix::new(1, 2, vec![iv(0.0, 1.0), iv(2.0, 2.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"data":[[0.0,1.0],[2.0,2.0]]}"#);
        assert_eq!(serde_json::from_str::<IntervalMatrix>(&s).unwrap(), m);
        assert!(serde_json::from_str::<IntervalMatrix>(r#"{"rows":2,"cols":2,"data":[[0.0,1.0]]}"#).is_err());
    }

    fn small_real() -> impl Strategy<Value = RealMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-10.0f64..10.0, r * c).prop_map(move |d| RealMatrix::new(r, c, d).unwrap())
        })
    }

    proptest! {
        #[test]
        fn embedding_commutes_with_product(a in small_real(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = RealMatrix::from_fn(a.n_cols(), 3, |_, _| rng.gen_range(-10.0..10.0));
            let lhs = IntervalMatrix::embed_classic(&a).matmul(&IntervalMatrix::embed_classic(&b)).unwrap();
            prop_assert!(is_equivalent(&a.matmul(&b).unwrap(), &lhs, 1e-12).unwrap());
        }

        #[test]
        fn midpoints_are_linear(seed in any::<u64>(), beta in -3.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_interval_matrix(&mut rng, 3, 4);
            let b = random_interval_matrix(&mut rng, 3, 4);
            let sum = a.checked_add(&b).unwrap().centers();
            let expect = a.centers().add(&b.centers()).unwrap();
            for (x, y) in sum.as_slice().iter().zip(expect.as_slice()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
            let scaled = a.scale_block(beta).unwrap().centers();
            for (x, y) in scaled.as_slice().iter().zip(a.centers().scale(beta).as_slice()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
            let centered = a.center_columns().unwrap().centers();
            for (x, y) in centered.as_slice().iter().zip(a.centers().center_columns().as_slice()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}
