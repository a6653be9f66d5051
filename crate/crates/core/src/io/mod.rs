//! File formats: interval CSV tables, TOML study manifests, JSON results.

pub mod manifest;
pub mod results;
pub mod table;

use std::path::{Path, PathBuf};

use thiserror::Error;

/// Anything wrong with user-supplied files. Always carries a location.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}: {message}")]
    Table { origin: String, message: String },
    #[error("{}: {message}", path.display())]
    Manifest { path: PathBuf, message: String },
    #[error("{}: {message}", path.display())]
    Results { path: PathBuf, message: String },
}

impl InputError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        InputError::Io { path: path.to_path_buf(), source }
    }

    pub(crate) fn manifest(path: &Path, message: impl Into<String>) -> Self {
        InputError::Manifest { path: path.to_path_buf(), message: message.into() }
    }
}
