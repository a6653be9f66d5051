//! JSON results documents.
//!
//! Every matrix is stored as an interval matrix `{rows, cols, data}` with
//! cells as `[lo, hi]` pairs, so interval and classic runs share one
//! layout and the plotting code reads both. Floats are written in
//! shortest round-trip form, so loading a document gives back exactly the
//! values that were written.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classic::ClassicStatisOutput;
use crate::io::manifest::{ManifestOptions, PlotDefaults};
use crate::io::InputError;
use crate::matrix::IntervalMatrix;
use crate::pipeline::{InterstatisOutput, StudyInput};

pub const FORMAT: &str = "interstatis-results";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Interstatis,
    Classic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub name: String,
    /// Digest of the inputs, see [`crate::io::manifest::LoadedStudy`].
    pub input_digest: String,
    pub options: ManifestOptions,
    pub plot: PlotDefaults,
    pub crate_version: String,
}

impl Metadata {
    pub fn new(name: impl Into<String>, input_digest: impl Into<String>) -> Self {
        Metadata {
            name: name.into(),
            input_digest: input_digest.into(),
            options: ManifestOptions::default(),
            plot: PlotDefaults::default(),
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultsDocument {
    pub format: String,
    pub version: u32,
    pub method: Method,
    pub metadata: Metadata,
    pub individuals: Vec<String>,
    pub tables: Vec<String>,
    pub variables: Vec<Vec<String>>,
    pub u: Vec<f64>,
    pub lambda1: f64,
    pub beta: Vec<f64>,
    pub inter_eigenvalues: Vec<f64>,
    pub intra_eigenvalues: Vec<f64>,
    pub intra_rank_deficient: Vec<bool>,
    /// Interstructure table coordinates, r × r.
    pub t: IntervalMatrix,
    /// Variable coordinates on the compromise axes, one row per variable.
    pub ev: IntervalMatrix,
    /// Average individuals, n × l.
    pub mi: IntervalMatrix,
    /// Individuals per table, row `k·n + i` is individual `i` in table `k`.
    pub ei: IntervalMatrix,
    pub w: Vec<IntervalMatrix>,
    pub xtilde: IntervalMatrix,
    pub ind: IntervalMatrix,
    pub compromise: IntervalMatrix,
}

impl ResultsDocument {
    pub fn from_interstatis(study: &StudyInput, out: &InterstatisOutput, metadata: Metadata) -> Self {
        ResultsDocument {
            format: FORMAT.into(),
            version: VERSION,
            method: Method::Interstatis,
            metadata,
            individuals: study.individual_names.clone(),
            tables: study.table_names.clone(),
            variables: study.variable_names.clone(),
            u: out.u.clone(),
            lambda1: out.lambda1,
            beta: out.beta.clone(),
            inter_eigenvalues: out.inter_eigenvalues.clone(),
            intra_eigenvalues: out.intra_eigenvalues.clone(),
            intra_rank_deficient: out.intra_rank_deficient.clone(),
            t: out.t.clone(),
            ev: out.ev.clone(),
            mi: out.mi.clone(),
            ei: out.ei.clone(),
            w: out.w.clone(),
            xtilde: out.xtilde.clone(),
            ind: out.ind.clone(),
            compromise: out.compromise.clone(),
        }
    }

    pub fn from_classic(study: &StudyInput, out: &ClassicStatisOutput, metadata: Metadata) -> Self {
        let e = IntervalMatrix::embed_classic;
        ResultsDocument {
            format: FORMAT.into(),
            version: VERSION,
            method: Method::Classic,
            metadata,
            individuals: study.individual_names.clone(),
            tables: study.table_names.clone(),
            variables: study.variable_names.clone(),
            u: out.u.clone(),
            lambda1: out.lambda1,
            beta: out.beta.clone(),
            inter_eigenvalues: out.inter_eigenvalues.clone(),
            intra_eigenvalues: out.intra_eigenvalues.clone(),
            intra_rank_deficient: out.intra_rank_deficient.clone(),
            t: e(&out.t),
            ev: e(&out.ev),
            mi: e(&out.mi),
            ei: e(&out.ei),
            w: out.w.iter().map(e).collect(),
            xtilde: e(&out.xtilde),
            ind: e(&out.ind),
            compromise: e(&out.compromise),
        }
    }

    /// Flat list of variable labels in `ev` row order.
    pub fn variable_labels(&self) -> Vec<String> {
        self.variables.iter().flatten().cloned().collect()
    }

    fn check(&self) -> Result<(), String> {
        if self.format != FORMAT {
            return Err(format!("unknown format {:?}", self.format));
        }
        if self.version != VERSION {
            return Err(format!("unsupported version {}", self.version));
        }
        let (n, r) = (self.individuals.len(), self.tables.len());
        let p: usize = self.variables.iter().map(Vec::len).sum();
        let l = self.mi.n_cols();
        let shapes = [
            ("t", self.t.shape(), (r, r)),
            ("ev", self.ev.shape(), (p, l)),
            ("mi", self.mi.shape(), (n, l)),
            ("ei", self.ei.shape(), (r * n, l)),
            ("compromise", self.compromise.shape(), (n, n)),
        ];
        for (what, got, want) in shapes {
            if got != want {
                return Err(format!("{what} is {}x{}, expected {}x{}", got.0, got.1, want.0, want.1));
            }
        }
        if self.variables.len() != r {
            return Err(format!("{} variable lists for {r} tables", self.variables.len()));
        }
        Ok(())
    }
}

pub fn write_results(path: &Path, doc: &ResultsDocument) -> Result<(), InputError> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| InputError::Results { path: path.to_path_buf(), message: e.to_string() })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| InputError::io(path, e))
}

pub fn read_results(path: &Path) -> Result<ResultsDocument, InputError> {
    let err = |message: String| InputError::Results { path: path.to_path_buf(), message };
    let text = fs::read_to_string(path).map_err(|e| InputError::io(path, e))?;
    let doc: ResultsDocument = serde_json::from_str(&text).map_err(|e| err(e.to_string()))?;
    doc.check().map_err(err)?;
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::pipeline::run;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn study() -> StudyInput {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let tables = [2usize, 3]
            .iter()
            .map(|&p| {
                IntervalMatrix::from_fn(5, p, |_, _| {
                    let c: f64 = rng.gen_range(-5.0..5.0);
                    Interval::from_center_radius(c, rng.gen_range(0.0..0.5)).unwrap()
                })
            })
            .collect();
        StudyInput::new(tables).unwrap()
    }

    #[test]
    fn round_trip_is_lossless() {
        let s = study();
        let out = run(&s).unwrap();
        let doc = ResultsDocument::from_interstatis(&s, &out, Metadata::new("t", "00"));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_results(&path, &doc).unwrap();
        let back = read_results(&path).unwrap();
        assert_eq!(back, doc);
        let text = fs::read_to_string(&path).unwrap();
        for key in ["\"t\"", "\"ev\"", "\"mi\"", "\"ei\"", "\"method\": \"interstatis\""] {
            assert!(text.contains(key), "{key}");
        }
    }

    #[test]
    fn rejects_foreign_documents() {
        let s = study();
        let out = run(&s).unwrap();
        let mut doc = ResultsDocument::from_interstatis(&s, &out, Metadata::new("t", "00"));
        doc.format = "other".into();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_results(&path, &doc).unwrap();
        assert!(read_results(&path).unwrap_err().to_string().contains("unknown format"));
        fs::write(&path, "{").unwrap();
        assert!(read_results(&path).unwrap_err().to_string().contains("r.json"));
    }
}
