//! Classic STATIS on real tables.
//!
//! Same sequence of steps as [`crate::pipeline`] in ordinary real
//! arithmetic, built directly on [`eigen::pca_triplet`]. For degenerate
//! interval inputs both must produce matching outputs.

use crate::eigen::{self, uniform_weights, EigenError};
use crate::matrix::{LinalgError, RealMatrix};
use crate::pipeline::{orient_first_axis, StatisError, Step, StepFailure};

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicOptions {
    pub center: bool,
    /// Divide every column by its population standard deviation.
    pub normalize: bool,
    /// Row weights of the intrastructure triplet; uniform when `None`.
    pub weights: Option<Vec<f64>>,
}

impl Default for ClassicOptions {
    fn default() -> Self {
        ClassicOptions { center: true, normalize: false, weights: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicStatisOutput {
    pub t: RealMatrix,
    pub u: Vec<f64>,
    pub lambda1: f64,
    pub beta: Vec<f64>,
    pub tables: Vec<RealMatrix>,
    pub w: Vec<RealMatrix>,
    pub interstructure_matrix: RealMatrix,
    pub xtilde: RealMatrix,
    pub mi: RealMatrix,
    pub ev: RealMatrix,
    pub ind: RealMatrix,
    pub ei: RealMatrix,
    pub compromise: RealMatrix,
    pub inter_eigenvalues: Vec<f64>,
    pub intra_eigenvalues: Vec<f64>,
    pub intra_rank_deficient: Vec<bool>,
}

fn standardize_columns(x: &RealMatrix, table: usize) -> Result<RealMatrix, StepFailure> {
    let n = x.n_rows() as f64;
    let mut out = x.clone();
    for j in 0..x.n_cols() {
        let col = x.column(j);
        let mean = col.iter().sum::<f64>() / n;
        let sd = (col.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / n).sqrt();
        if !(sd > 0.0) {
            return Err(StepFailure::ZeroVariable { table: table + 1, variable: j + 1 });
        }
        for i in 0..x.n_rows() {
            out[(i, j)] = x[(i, j)] * (1.0 / sd);
        }
    }
    Ok(out)
}

pub fn run_classic(tables: &[RealMatrix], options: &ClassicOptions) -> Result<ClassicStatisOutput, StatisError> {
    let first = tables.first().ok_or_else(|| StatisError::InvalidStudy("at least one table is required".into()))?;
    let n = first.n_rows();
    if n == 0 {
        return Err(StatisError::InvalidStudy("tables must have at least one individual".into()));
    }
    if let Some(k) = tables.iter().position(|t| t.n_rows() != n) {
        return Err(StatisError::InvalidStudy(format!(
            "table {} has {} individuals, expected {n}",
            k + 1,
            tables[k].n_rows()
        )));
    }
    let weights = options.weights.clone().unwrap_or_else(|| uniform_weights(n));
    eigen::check_weights(&weights, n).map_err(|e| StatisError::InvalidStudy(e.to_string()))?;

    let tables = tables
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let mut t = if options.center { t.center_columns() } else { t.clone() };
            if options.normalize {
                t = standardize_columns(&t, k).map_err(|e| StatisError::at(Step::Preprocess, e))?;
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>, StatisError>>()?;

    let w = tables
        .iter()
        .map(|x| x.matmul(&x.transpose()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| StatisError::at(Step::Gram, e))?;
    let vecs: Vec<RealMatrix> = w.iter().map(RealMatrix::vectorize).collect();
    let x = RealMatrix::hconcat(&vecs).map_err(|e| StatisError::at(Step::InterstructureMatrix, e))?;

    // interstructure
    let (rows, r) = x.shape();
    let iw = uniform_weights(rows);
    let mut shifted = x.clone();
    for j in 0..r {
        let mean: f64 = (0..rows).map(|i| iw[i] * x[(i, j)]).sum();
        for i in 0..rows {
            shifted[(i, j)] = x[(i, j)] - mean;
        }
    }
    let at3 = |e: StepFailure| StatisError::at(Step::Interstructure, e);
    let metric = eigen::inverse_variance_metric(&shifted, &iw).map_err(|e| match e {
        EigenError::ZeroVariance { column } => at3(StepFailure::ZeroSpread { table: column + 1 }),
        other => at3(other.into()),
    })?;
    let mut inter = eigen::pca_triplet(&shifted, &metric, &iw).map_err(|e| at3(e.into()))?;
    let lambda1 = inter.eigenvalues[0];
    if !(lambda1 > 0.0) {
        return Err(at3(StepFailure::ZeroEigenvalue));
    }
    if orient_first_axis(&inter.first_eigenvector()) {
        inter.flip_axis(0);
    }
    let u = inter.first_eigenvector();
    let beta: Vec<f64> = u.iter().map(|x| x / lambda1.sqrt()).collect();

    let blocks: Vec<RealMatrix> = tables.iter().zip(&beta).map(|(t, &b)| t.scale(b)).collect();
    let xtilde = RealMatrix::hconcat(&blocks).map_err(|e| StatisError::at(Step::BlockMatrix, e))?;
    let l = xtilde.n_cols();
    let intra =
        eigen::pca_triplet(&xtilde, &vec![1.0; l], &weights).map_err(|e| StatisError::at(Step::Intrastructure, e))?;

    let mut compromise = RealMatrix::zeros(n, n);
    for (wk, &b) in w.iter().zip(&beta) {
        compromise = compromise.add(&wk.scale(b)).map_err(|e: LinalgError| StatisError::at(Step::Compromise, e))?;
    }
    let ind = RealMatrix::vstack(&w).map_err(|e| StatisError::at(Step::Ind, e))?;
    let ei = ind.matmul(&intra.row_scores).map_err(|e| StatisError::at(Step::IndividualEvolution, e))?;

    Ok(ClassicStatisOutput {
        t: inter.var_coords.clone(),
        u,
        lambda1,
        beta,
        tables,
        w,
        interstructure_matrix: x,
        xtilde,
        mi: intra.row_scores,
        ev: intra.var_coords,
        ind,
        ei,
        compromise,
        inter_eigenvalues: inter.eigenvalues,
        intra_eigenvalues: intra.eigenvalues,
        intra_rank_deficient: intra.rank_deficient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::jacobi_eigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tables(seed: u64, n: usize, widths: &[usize]) -> Vec<RealMatrix> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        widths.iter().map(|&p| RealMatrix::from_fn(n, p, |_, _| rng.gen_range(-5.0..5.0))).collect()
    }

    #[test]
    fn single_table() {
        let t = random_tables(51, 6, &[3]);
        let out = run_classic(&t, &ClassicOptions::default()).unwrap();
        assert_eq!(out.t.shape(), (1, 1));
        assert_eq!(out.u, vec![1.0]);
        assert!((out.beta[0] - 1.0 / out.lambda1.sqrt()).abs() < 1e-15);
        // intrastructure is a PCA of β·X₁ : eigenvalues scale by β²
        let plain = eigen::pca_triplet(&t[0].center_columns(), &[1.0; 3], &uniform_weights(6)).unwrap();
        for (a, b) in out.intra_eigenvalues.iter().zip(&plain.eigenvalues) {
            assert!((a - out.beta[0].powi(2) * b).abs() < 1e-10);
        }
    }

    #[test]
    fn identical_tables_get_equal_weights() {
        let t = random_tables(52, 6, &[3]);
        let out = run_classic(&[t[0].clone(), t[0].clone()], &ClassicOptions::default()).unwrap();
        assert!((out.beta[0] - out.beta[1]).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.u[0] - h).abs() < 1e-12 && (out.u[1] - h).abs() < 1e-12);
        assert!((out.lambda1 - 2.0).abs() < 1e-12);
        assert!((out.t[(0, 0)] - 1.0).abs() < 1e-12 && (out.t[(1, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compromise_is_psd_and_t_first_axis_non_negative() {
        let t = random_tables(53, 7, &[3, 4, 2, 3]);
        let out = run_classic(&t, &ClassicOptions::default()).unwrap();
        let c = &out.compromise;
        for i in 0..7 {
            for j in 0..7 {
                assert!((c[(i, j)] - c[(j, i)]).abs() <= 1e-9);
            }
        }
        let e = jacobi_eigen(c, eigen::DEFAULT_TOL).unwrap();
        assert!(e.values.iter().all(|&v| v >= -1e-9 * e.values[0]));
        assert!(out.beta.iter().all(|&b| b > 0.0));
        assert!((0..4).all(|k| out.t[(k, 0)] >= 0.0));
        let inner = out.ind.matmul(&out.mi).unwrap();
        assert_eq!(inner, out.ei);
    }

    #[test]
    fn permuting_tables_permutes_outputs() {
        let t = random_tables(54, 6, &[3, 4, 2]);
        let a = run_classic(&t, &ClassicOptions::default()).unwrap();
        let perm = [2usize, 0, 1];
        let tp: Vec<_> = perm.iter().map(|&k| t[k].clone()).collect();
        let b = run_classic(&tp, &ClassicOptions::default()).unwrap();
        assert!((a.lambda1 - b.lambda1).abs() < 1e-10);
        for (new, &old) in perm.iter().enumerate() {
            assert!((a.beta[old] - b.beta[new]).abs() < 1e-10);
            assert!((a.t[(old, 0)] - b.t[(new, 0)]).abs() < 1e-10);
        }
    }

    #[test]
    fn row_count_mismatch() {
        let err =
            run_classic(&[RealMatrix::zeros(3, 2), RealMatrix::zeros(4, 2)], &ClassicOptions::default()).unwrap_err();
        assert!(matches!(err, StatisError::InvalidStudy(_)));
    }

    #[test]
    fn constant_table_reports_zero_spread() {
        let mut t = random_tables(55, 5, &[2, 2]);
        t[0] = RealMatrix::from_fn(5, 2, |_, j| j as f64);
        let err = run_classic(&t, &ClassicOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            StatisError::Step { step: Step::Interstructure, source: StepFailure::ZeroSpread { table: 1 } }
        ));
    }
}
