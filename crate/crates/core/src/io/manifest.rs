//! Study manifests.
//!
//! ```toml
//! name = "wine"
//! output_dir = "out"          # optional, relative to the manifest
//!
//! [options]                   # optional, these are the defaults
//! center = true
//! normalize_widths = false
//! n_axes = 2
//! degeneracy_tol = 0.0
//!
//! [plot]                      # optional
//! subset = ["wine1", "wine2"]
//!
//! [[tables]]
//! name = "expert1"
//! file = "expert1.csv"
//! ```
//!
//! Table paths are resolved against the manifest's directory. Every table
//! must list the same individuals in the same order.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::eigen::uniform_weights;
use crate::exec::Exec;
use crate::io::table::{read_table, Table};
use crate::io::InputError;
use crate::pipeline::{StudyInput, StudyOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: String,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub options: ManifestOptions,
    #[serde(default)]
    pub plot: PlotDefaults,
    pub tables: Vec<TableEntry>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ManifestOptions {
    pub center: bool,
    pub normalize_widths: bool,
    pub n_axes: usize,
    /// Cells narrower than this are drawn as points or segments.
    pub degeneracy_tol: f64,
}

impl Default for ManifestOptions {
    fn default() -> Self {
        let d = StudyOptions::default();
        ManifestOptions {
            center: d.center,
            normalize_widths: d.normalize_widths,
            n_axes: d.n_axes,
            degeneracy_tol: 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlotDefaults {
    /// Individuals highlighted in the evolution plot; all when empty.
    pub subset: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub name: String,
    pub file: PathBuf,
}

#[derive(Debug, Clone)]
pub struct LoadedStudy {
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
    pub study: StudyInput,
    /// Hex SHA-256 over the manifest text followed by every table file.
    pub digest: String,
}

impl LoadedStudy {
    /// `output_dir` resolved against the manifest's directory.
    pub fn output_dir(&self) -> PathBuf {
        base_dir(&self.manifest_path).join(&self.manifest.output_dir)
    }
}

fn base_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

pub fn parse_manifest(text: &str, path: &Path) -> Result<Manifest, InputError> {
    let m: Manifest = toml::from_str(text).map_err(|e| InputError::manifest(path, e.to_string().trim_end()))?;
    if m.tables.is_empty() {
        return Err(InputError::manifest(path, "at least one [[tables]] entry is required"));
    }
    let mut seen = HashSet::new();
    for (k, t) in m.tables.iter().enumerate() {
        if t.name.is_empty() {
            return Err(InputError::manifest(path, format!("tables[{k}]: empty name")));
        }
        if !seen.insert(t.name.as_str()) {
            return Err(InputError::manifest(path, format!("tables[{k}]: duplicate table name '{}'", t.name)));
        }
    }
    if m.options.n_axes == 0 {
        return Err(InputError::manifest(path, "options.n_axes must be at least 1"));
    }
    if !(m.options.degeneracy_tol >= 0.0 && m.options.degeneracy_tol.is_finite()) {
        return Err(InputError::manifest(path, "options.degeneracy_tol must be a finite non-negative number"));
    }
    Ok(m)
}

/// Reads a manifest and all of its tables into a validated study.
pub fn load_study(path: &Path, exec: Exec) -> Result<LoadedStudy, InputError> {
    let text_bytes = fs::read(path).map_err(|e| InputError::io(path, e))?;
    let text = String::from_utf8(text_bytes.clone()).map_err(|_| InputError::manifest(path, "not valid UTF-8"))?;
    let manifest = parse_manifest(&text, path)?;

    let mut hasher = Sha256::new();
    hasher.update(&text_bytes);
    let base = base_dir(path);
    let mut tables: Vec<Table> = Vec::with_capacity(manifest.tables.len());
    for entry in &manifest.tables {
        let file = base.join(&entry.file);
        let bytes = fs::read(&file).map_err(|e| InputError::io(&file, e))?;
        hasher.update(&bytes);
        tables.push(read_table(bytes.as_slice(), &file.display().to_string())?);
    }
    let digest = hex::encode(hasher.finalize());

    let individuals = tables[0].individuals.clone();
    for (entry, t) in manifest.tables.iter().zip(&tables).skip(1) {
        if t.individuals != individuals {
            let first = &manifest.tables[0].name;
            let detail = match t.individuals.iter().zip(&individuals).position(|(a, b)| a != b) {
                Some(i) => format!("row {} is '{}' but '{first}' has '{}'", i + 2, t.individuals[i], individuals[i]),
                None => format!("{} individuals but '{first}' has {}", t.individuals.len(), individuals.len()),
            };
            return Err(InputError::manifest(path, format!("table '{}': {detail}", entry.name)));
        }
    }

    let o = &manifest.options;
    let study = StudyInput {
        individual_names: individuals,
        table_names: manifest.tables.iter().map(|t| t.name.clone()).collect(),
        variable_names: tables.iter().map(|t| t.variables.clone()).collect(),
        weights: uniform_weights(tables[0].individuals.len()),
        options: StudyOptions { center: o.center, normalize_widths: o.normalize_widths, n_axes: o.n_axes, exec },
        tables: tables.into_iter().map(|t| t.data).collect(),
    };
    study.validate().map_err(|e| InputError::manifest(path, e.to_string()))?;
    Ok(LoadedStudy { manifest, manifest_path: path.to_path_buf(), study, digest })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    const MANIFEST: &str = r#"
name = "demo"
[[tables]]
name = "a"
file = "a.csv"
[[tables]]
name = "b"
file = "sub/b.csv"
"#;

    fn setup(b: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "a.csv", "id,x,y\nr1,1:2,3\nr2,0,1:4\nr3,2,2\n");
        fs::create_dir(dir.path().join("sub")).unwrap();
        write(&dir.path().join("sub"), "b.csv", b);
        let m = write(dir.path(), "m.toml", MANIFEST);
        (dir, m)
    }

    #[test]
    fn loads_relative_tables_with_defaults() {
        let (_dir, m) = setup("id,z\nr1,1\nr2,2:3\nr3,0\n");
        let s = load_study(&m, Exec::Sequential).unwrap();
        assert_eq!(s.study.individual_names, vec!["r1", "r2", "r3"]);
        assert_eq!(s.study.table_names, vec!["a", "b"]);
        assert_eq!(s.study.variable_names, vec![vec!["x", "y"], vec!["z"]]);
        assert_eq!(s.manifest.options, ManifestOptions::default());
        assert_eq!(s.manifest.output_dir, PathBuf::from("out"));
        assert_eq!(s.digest.len(), 64);
        assert_eq!(s.output_dir(), m.parent().unwrap().join("out"));
    }

    #[test]
    fn digest_tracks_table_bytes() {
        let (_d1, m1) = setup("id,z\nr1,1\nr2,2:3\nr3,0\n");
        let (_d2, m2) = setup("id,z\nr1,1\nr2,2:3.5\nr3,0\n");
        let a = load_study(&m1, Exec::Sequential).unwrap().digest;
        let b = load_study(&m2, Exec::Sequential).unwrap().digest;
        assert_ne!(a, b);
        assert_eq!(a, load_study(&m1, Exec::Sequential).unwrap().digest);
    }

    #[test]
    fn individual_mismatch_is_located() {
        let (_dir, m) = setup("id,z\nr1,1\nrX,2\nr3,0\n");
        let e = load_study(&m, Exec::Sequential).unwrap_err().to_string();
        assert!(e.contains("table 'b': row 3 is 'rX'"), "{e}");
    }

    #[test]
    fn manifest_errors() {
        let p = Path::new("m.toml");
        let cases = [
            ("name = \"x\"\ntables = []\n", "at least one"),
            ("name = \"x\"\nbogus = 1\n[[tables]]\nname=\"a\"\nfile=\"a\"\n", "bogus"),
            ("name = \"x\"\n[[tables]]\nname=\"a\"\nfile=\"a\"\n[[tables]]\nname=\"a\"\nfile=\"b\"\n", "duplicate"),
            ("name = \"x\"\n[options]\nn_axes = 0\n[[tables]]\nname=\"a\"\nfile=\"a\"\n", "n_axes"),
        ];
        for (text, needle) in cases {
            let e = parse_manifest(text, p).unwrap_err().to_string();
            assert!(e.contains(needle) && e.starts_with("m.toml"), "{e}");
        }
    }

    #[test]
    fn missing_table_file_names_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let m = write(dir.path(), "m.toml", "name = \"x\"\n[[tables]]\nname = \"a\"\nfile = \"nope.csv\"\n");
        let e = load_study(&m, Exec::Sequential).unwrap_err().to_string();
        assert!(e.contains("nope.csv"), "{e}");
    }
}
