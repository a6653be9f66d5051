//! The interval STATIS pipeline.
//!
//! Interstructure: Gram matrices `W_k = X_k × X_kᵀ`, their vectorizations
//! side by side, and a standardized centers PCA yielding the table
//! correlations `T` together with the real first eigenpair `(u, λ₁)`.
//!
//! Intrastructure: weights `β = u / √λ₁`, the block matrix
//! `X̃ = [β₁X₁ | … | β_rX_r]` and its centers PCA, giving the average
//! individuals `Mi` and variable evolution `Ev`.
//!
//! Evolution of individuals: `Ei = IND × Mi` where `IND` stacks the `W_k`.

use std::fmt;

use thiserror::Error;

use crate::cpca::{self, CpcaError, IntervalPcaResult};
use crate::eigen::{self, uniform_weights, EigenError};
use crate::exec::Exec;
use crate::interval::{Interval, IntervalError};
use crate::matrix::{IntervalMatrix, LinalgError};

/// Algorithm step a failure is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Preprocess,
    Gram,
    InterstructureMatrix,
    Interstructure,
    Beta,
    BlockMatrix,
    Intrastructure,
    Compromise,
    Ind,
    IndividualEvolution,
}

impl Step {
    pub fn number(self) -> Option<u8> {
        match self {
            Step::Preprocess | Step::Compromise => None,
            Step::Gram => Some(1),
            Step::InterstructureMatrix => Some(2),
            Step::Interstructure => Some(3),
            Step::Beta => Some(5),
            Step::BlockMatrix => Some(6),
            Step::Intrastructure => Some(7),
            Step::Ind => Some(10),
            Step::IndividualEvolution => Some(11),
        }
    }

    fn label(self) -> &'static str {
        match self {
            Step::Preprocess => "preprocessing",
            Step::Gram => "Gram matrices W_k",
            Step::InterstructureMatrix => "interstructure matrix",
            Step::Interstructure => "interstructure CPCA",
            Step::Beta => "compromise weights",
            Step::BlockMatrix => "block matrix X~",
            Step::Intrastructure => "intrastructure CPCA",
            Step::Compromise => "compromise",
            Step::Ind => "IND matrix",
            Step::IndividualEvolution => "individual evolution Ei",
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.number() {
            Some(n) => write!(f, "step {n} ({})", self.label()),
            None => f.write_str(self.label()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepFailure {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Cpca(#[from] CpcaError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error("table {table} has zero spread: its Gram matrix is constant")]
    ZeroSpread { table: usize },
    #[error("variable {variable} of table {table} has zero spread")]
    ZeroVariable { table: usize, variable: usize },
    #[error("first interstructure eigenvalue is zero")]
    ZeroEigenvalue,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatisError {
    #[error("invalid study: {0}")]
    InvalidStudy(String),
    #[error("{step}: {source}")]
    Step {
        step: Step,
        #[source]
        source: StepFailure,
    },
}

impl StatisError {
    pub fn at(step: Step, source: impl Into<StepFailure>) -> Self {
        StatisError::Step { step, source: source.into() }
    }

    pub fn step(&self) -> Option<Step> {
        match self {
            StatisError::Step { step, .. } => Some(*step),
            StatisError::InvalidStudy(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyOptions {
    /// Center every table by its interval column means before step 1.
    pub center: bool,
    /// Divide every column by the standard deviation of its centers.
    pub normalize_widths: bool,
    /// Number of axes shown in plots.
    pub n_axes: usize,
    pub exec: Exec,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions { center: true, normalize_widths: false, n_axes: 2, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyInput {
    pub tables: Vec<IntervalMatrix>,
    pub individual_names: Vec<String>,
    pub table_names: Vec<String>,
    pub variable_names: Vec<Vec<String>>,
    /// Row weights of the intrastructure triplet (the diagonal of `D`).
    pub weights: Vec<f64>,
    pub options: StudyOptions,
}

impl StudyInput {
    /// A study with generated names, uniform weights and default options.
    pub fn new(tables: Vec<IntervalMatrix>) -> Result<Self, StatisError> {
        let n = tables.first().map_or(0, IntervalMatrix::n_rows);
        let study = StudyInput {
            individual_names: (1..=n).map(|i| format!("ind{i}")).collect(),
            table_names: (1..=tables.len()).map(|k| format!("table{k}")).collect(),
            variable_names: tables.iter().map(|t| (1..=t.n_cols()).map(|j| format!("v{j}")).collect()).collect(),
            weights: uniform_weights(n),
            options: StudyOptions::default(),
            tables,
        };
        study.validate()?;
        Ok(study)
    }

    pub fn with_options(mut self, options: StudyOptions) -> Self {
        self.options = options;
        self
    }

    pub fn n_individuals(&self) -> usize {
        self.individual_names.len()
    }

    pub fn n_tables(&self) -> usize {
        self.tables.len()
    }

    pub fn n_variables(&self) -> usize {
        self.tables.iter().map(IntervalMatrix::n_cols).sum()
    }

    pub fn validate(&self) -> Result<(), StatisError> {
        let bad = |m: String| Err(StatisError::InvalidStudy(m));
        if self.tables.is_empty() {
            return bad("at least one table is required".into());
        }
        let n = self.tables[0].n_rows();
        if n == 0 {
            return bad("tables must have at least one individual".into());
        }
        for (k, t) in self.tables.iter().enumerate() {
            if t.n_rows() != n {
                return bad(format!("table {} has {} individuals, expected {n}", k + 1, t.n_rows()));
            }
            if t.n_cols() == 0 {
                return bad(format!("table {} has no variables", k + 1));
            }
        }
        if self.individual_names.len() != n {
            return bad(format!("{} individual names for {n} individuals", self.individual_names.len()));
        }
        if self.table_names.len() != self.tables.len() {
            return bad(format!("{} table names for {} tables", self.table_names.len(), self.tables.len()));
        }
        if self.variable_names.len() != self.tables.len()
            || self.variable_names.iter().zip(&self.tables).any(|(v, t)| v.len() != t.n_cols())
        {
            return bad("variable names do not match table widths".into());
        }
        if self.options.n_axes == 0 {
            return bad("n_axes must be at least 1".into());
        }
        eigen::check_weights(&self.weights, n).map_err(|e| StatisError::InvalidStudy(e.to_string()))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterstatisOutput {
    /// Table correlations, `r × r`.
    pub t: IntervalMatrix,
    pub u: Vec<f64>,
    pub lambda1: f64,
    pub beta: Vec<f64>,
    /// Preprocessed input tables actually analysed.
    pub tables: Vec<IntervalMatrix>,
    pub w: Vec<IntervalMatrix>,
    /// `n² × r` matrix of vectorized `W_k`.
    pub interstructure_matrix: IntervalMatrix,
    pub xtilde: IntervalMatrix,
    /// Average individuals, `n × l`.
    pub mi: IntervalMatrix,
    /// Variable evolution, `l × l`.
    pub ev: IntervalMatrix,
    pub ind: IntervalMatrix,
    /// Individual evolution, `rn × l`.
    pub ei: IntervalMatrix,
    pub compromise: IntervalMatrix,
    pub inter_eigenvalues: Vec<f64>,
    pub intra_eigenvalues: Vec<f64>,
    pub intra_rank_deficient: Vec<bool>,
}

/// Step 1: `W_k = X_k × X_kᵀ` for every table.
pub fn compute_w(tables: &[IntervalMatrix], exec: Exec) -> Result<Vec<IntervalMatrix>, LinalgError> {
    exec.try_map_range(tables.len(), |k| tables[k].matmul_with(&tables[k].transpose(), exec))
}

/// Step 2: `[vec W₁ | … | vec W_r]`, each column a row-major vectorization.
pub fn build_interstructure_matrix(w: &[IntervalMatrix]) -> Result<IntervalMatrix, LinalgError> {
    let cols: Vec<IntervalMatrix> = w.iter().map(IntervalMatrix::vectorize).collect();
    IntervalMatrix::hconcat(&cols)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interstructure {
    pub t: IntervalMatrix,
    pub u: Vec<f64>,
    pub lambda1: f64,
    pub pca: IntervalPcaResult,
}

/// Step 3: standardized centers PCA of the `n² × r` interstructure matrix
/// with uniform weights `1/n²`.
///
/// Columns are shifted by the mean of their centers first (a no-op for
/// centered degenerate tables, whose Gram matrices sum to zero).
pub fn interstructure(x: &IntervalMatrix, exec: Exec) -> Result<Interstructure, StepFailure> {
    let (rows, r) = x.shape();
    let weights = uniform_weights(rows);
    let centers = x.centers();
    let mut shifted = x.clone();
    for j in 0..r {
        let mean: f64 = (0..rows).map(|i| weights[i] * centers[(i, j)]).sum();
        for i in 0..rows {
            let c = x[(i, j)];
            shifted[(i, j)] = Interval::new(c.lo() - mean, c.hi() - mean)?;
        }
    }
    let metric = eigen::inverse_variance_metric(&shifted.centers(), &weights).map_err(|e| match e {
        EigenError::ZeroVariance { column } => StepFailure::ZeroSpread { table: column + 1 },
        other => other.into(),
    })?;
    let mut pca = cpca::cpca_with(&shifted, &metric, &weights, r, exec)?;
    if !(pca.first_eigenvalue > 0.0) {
        return Err(StepFailure::ZeroEigenvalue);
    }
    if orient_first_axis(&pca.first_eigenvector) {
        pca.flip_axis(0);
    }
    Ok(Interstructure {
        t: pca.var_coords.clone(),
        u: pca.first_eigenvector.clone(),
        lambda1: pca.first_eigenvalue,
        pca,
    })
}

/// Whether the first eigenvector must be negated so that the compromise
/// weights come out non-negative.
pub(crate) fn orient_first_axis(u: &[f64]) -> bool {
    u.iter().sum::<f64>() < 0.0
}

/// Step 5: `β = u / √λ₁`.
pub fn compute_beta(u: &[f64], lambda1: f64) -> Result<Vec<f64>, StepFailure> {
    if !(lambda1 > 0.0) {
        return Err(StepFailure::ZeroEigenvalue);
    }
    let s = lambda1.sqrt();
    Ok(u.iter().map(|x| x / s).collect())
}

/// Step 6: `X̃ = [β₁X₁ | … | β_rX_r]`.
pub fn build_xtilde(tables: &[IntervalMatrix], beta: &[f64]) -> Result<IntervalMatrix, LinalgError> {
    if tables.len() != beta.len() {
        return Err(LinalgError::DimensionMismatch {
            op: "build_xtilde",
            left: (tables.len(), 1),
            right: (beta.len(), 1),
        });
    }
    let blocks = tables.iter().zip(beta).map(|(x, &b)| x.scale_block(b)).collect::<Result<Vec<_>, _>>()?;
    IntervalMatrix::hconcat(&blocks)
}

/// Step 7: centers PCA of `(X̃, I_l, D)` over all `l` axes.
pub fn intrastructure(xtilde: &IntervalMatrix, weights: &[f64], exec: Exec) -> Result<IntervalPcaResult, CpcaError> {
    let l = xtilde.n_cols();
    cpca::cpca_with(xtilde, &vec![1.0; l], weights, l, exec)
}

/// `Σ β_k W_k`.
pub fn compromise_matrix(w: &[IntervalMatrix], beta: &[f64]) -> Result<IntervalMatrix, LinalgError> {
    let first = w.first().ok_or(LinalgError::Empty { op: "compromise" })?;
    let mut acc = IntervalMatrix::zeros(first.n_rows(), first.n_cols());
    for (wk, &b) in w.iter().zip(beta) {
        acc = acc.checked_add(&wk.scale_block(b)?)?;
    }
    Ok(acc)
}

/// Step 10: `IND = [W₁; …; W_r]`.
pub fn build_ind(w: &[IntervalMatrix]) -> Result<IntervalMatrix, LinalgError> {
    IntervalMatrix::vstack(w)
}

/// Step 11: `Ei = IND × Mi`.
pub fn individuals_evolution(
    ind: &IntervalMatrix,
    mi: &IntervalMatrix,
    exec: Exec,
) -> Result<IntervalMatrix, LinalgError> {
    ind.matmul_with(mi, exec)
}

/// Centering and optional width normalisation, as configured.
pub fn preprocess(study: &StudyInput) -> Result<Vec<IntervalMatrix>, StatisError> {
    study
        .tables
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let mut t = t.clone();
            if study.options.center {
                t = t.center_columns().map_err(|e| StatisError::at(Step::Preprocess, e))?;
            }
            if study.options.normalize_widths {
                t = t.normalize_widths().map_err(|e| match e {
                    LinalgError::ZeroSpread { column } => StatisError::at(
                        Step::Preprocess,
                        StepFailure::ZeroVariable { table: k + 1, variable: column + 1 },
                    ),
                    other => StatisError::at(Step::Preprocess, other),
                })?;
            }
            Ok(t)
        })
        .collect()
}

/// Runs the full pipeline and keeps every intermediate.
pub fn run(study: &StudyInput) -> Result<InterstatisOutput, StatisError> {
    study.validate()?;
    let exec = study.options.exec;
    let tables = preprocess(study)?;

    let w = compute_w(&tables, exec).map_err(|e| StatisError::at(Step::Gram, e))?;
    let x = build_interstructure_matrix(&w).map_err(|e| StatisError::at(Step::InterstructureMatrix, e))?;
    let inter = interstructure(&x, exec).map_err(|e| StatisError::at(Step::Interstructure, e))?;
    let beta = compute_beta(&inter.u, inter.lambda1).map_err(|e| StatisError::at(Step::Beta, e))?;
    let xtilde = build_xtilde(&tables, &beta).map_err(|e| StatisError::at(Step::BlockMatrix, e))?;
    let intra = intrastructure(&xtilde, &study.weights, exec).map_err(|e| StatisError::at(Step::Intrastructure, e))?;
    let compromise = compromise_matrix(&w, &beta).map_err(|e| StatisError::at(Step::Compromise, e))?;
    let ind = build_ind(&w).map_err(|e| StatisError::at(Step::Ind, e))?;
    let ei = individuals_evolution(&ind, &intra.row_components, exec)
        .map_err(|e| StatisError::at(Step::IndividualEvolution, e))?;

    Ok(InterstatisOutput {
        t: inter.t,
        u: inter.u,
        lambda1: inter.lambda1,
        beta,
        tables,
        w,
        interstructure_matrix: x,
        xtilde,
        mi: intra.row_components,
        ev: intra.var_coords,
        ind,
        ei,
        compromise,
        inter_eigenvalues: inter.pca.eigenvalues,
        intra_eigenvalues: intra.eigenvalues,
        intra_rank_deficient: intra.rank_deficient,
    })
}
