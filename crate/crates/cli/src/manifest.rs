//! Run manifest and artifact index. Both are deterministic: no
//! timestamps, no absolute paths, stable ordering.

use crate::config::Settings;
use crate::errors::CliError;
use numprobe::report::write_text_atomic;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const MANIFEST_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub seed: u64,
    pub n: usize,
    pub folds: usize,
    pub levels: Vec<u32>,
    pub families: Vec<String>,
    pub models: Vec<String>,
    pub normalize: bool,
    pub global_pca: bool,
    pub ridge: Option<f64>,
    pub rcond: f64,
    pub magnitude_bound: i64,
    pub table_formats: Vec<String>,
    pub cache_used: bool,
}

impl RunManifest {
    pub fn from_settings(settings: &Settings) -> Self {
        Self {
            format_version: MANIFEST_FORMAT_VERSION,
            seed: settings.seed,
            n: settings.n,
            folds: settings.folds,
            levels: settings.levels.clone(),
            families: settings.families.iter().map(|f| f.name().to_string()).collect(),
            models: settings.models.iter().map(|m| m.canonical()).collect(),
            normalize: settings.eval.normalize,
            global_pca: settings.eval.global_pca,
            ridge: settings.eval.ridge,
            rcond: settings.eval.rcond,
            magnitude_bound: settings.magnitude_bound,
            table_formats: settings
                .formats
                .iter()
                .map(|f| f.extension().to_string())
                .collect(),
            cache_used: settings.cache.is_some(),
        }
    }
}

pub fn write_manifest(path: &Path, settings: &Settings) -> Result<(), CliError> {
    let manifest = RunManifest::from_settings(settings);
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Other(format!("manifest serialization: {e}")))?;
    text.push('\n');
    write_text_atomic(path, &text)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct IndexEntry {
    path: String,
    bytes: u64,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Index {
    format_version: u32,
    files: Vec<IndexEntry>,
}

fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), CliError> {
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        let path = entry.path();
        if entry.file_type()?.is_dir() {
            walk(&path, out)?;
        } else {
            out.push(path);
        }
    }
    Ok(())
}

/// Hash every artifact under `root` (except the index itself and anything
/// under `exclude`) into `index.json`, sorted by relative path.
pub fn write_index(root: &Path, index_path: &Path, exclude: &[PathBuf]) -> Result<(), CliError> {
    let mut files = Vec::new();
    walk(root, &mut files)?;
    let mut entries = Vec::with_capacity(files.len());
    for path in files {
        if path == index_path || exclude.iter().any(|ex| path.starts_with(ex)) {
            continue;
        }
        let rel = path
            .strip_prefix(root)
            .map_err(|_| CliError::Other(format!("{} escapes {}", path.display(), root.display())))?;
        let bytes = std::fs::read(&path)?;
        entries.push(IndexEntry {
            path: rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/"),
            bytes: bytes.len() as u64,
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
    }
    entries.sort_by(|a, b| a.path.cmp(&b.path));
    let index = Index {
        format_version: MANIFEST_FORMAT_VERSION,
        files: entries,
    };
    let mut text = serde_json::to_string_pretty(&index)
        .map_err(|e| CliError::Other(format!("index serialization: {e}")))?;
    text.push('\n');
    write_text_atomic(index_path, &text)?;
    Ok(())
}
