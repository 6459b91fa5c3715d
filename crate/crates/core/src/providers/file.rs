//! Embedding persistence: JSON-lines files binding vectors to the dataset
//! they embed.
//!
//! The header carries the model, provider, dimension, row count and a
//! fingerprint of the source dataset, so downstream evaluation can refuse
//! mismatched dataset/embedding pairs instead of silently misaligning rows.

use super::model::{ModelRef, Provider};
use super::{EmbeddingMatrix, ProviderError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::Path;

/// Version stamp written into every embedding file header.
pub const EMBEDDING_FORMAT_VERSION: u32 = 1;

/// SHA-256 of a dataset file's raw bytes, hex encoded.
pub fn dataset_fingerprint(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Fingerprint for ad-hoc text lists with no backing file. Each text is
/// length-prefixed so concatenation ambiguities cannot collide.
pub fn texts_fingerprint(texts: &[String]) -> String {
    let mut h = Sha256::new();
    for t in texts {
        h.update((t.len() as u64).to_le_bytes());
        h.update(t.as_bytes());
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Serialize, Deserialize)]
struct EmbeddingHeader {
    model: String,
    provider: Provider,
    dim: usize,
    count: usize,
    dataset_fingerprint: String,
    format_version: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct EmbeddingRecord {
    index: usize,
    vector: Vec<f64>,
}

/// A loaded embedding file.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingFile {
    /// Canonical model string as written.
    pub model: String,
    pub provider: Provider,
    pub dataset_fingerprint: String,
    pub matrix: EmbeddingMatrix,
}

fn format_err(path: &Path, line: usize, detail: String) -> ProviderError {
    ProviderError::MalformedResponse {
        detail: format!("{} (line {line}): {detail}", path.display()),
    }
}

/// Write `matrix` to `path` with its provenance header.
pub fn write_embeddings(
    path: &Path,
    model: &ModelRef,
    matrix: &EmbeddingMatrix,
    dataset_fingerprint: &str,
) -> Result<(), ProviderError> {
    let header = EmbeddingHeader {
        model: model.canonical(),
        provider: model.provider(),
        dim: matrix.dim(),
        count: matrix.len(),
        dataset_fingerprint: dataset_fingerprint.to_string(),
        format_version: EMBEDDING_FORMAT_VERSION,
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for (index, row) in matrix.rows().iter().enumerate() {
        let record = EmbeddingRecord {
            index,
            vector: row.clone(),
        };
        out.push_str(&serde_json::to_string(&record).expect("record serializes"));
        out.push('\n');
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read an embedding file back, validating shape, order and values.
pub fn read_embeddings(path: &Path) -> Result<EmbeddingFile, ProviderError> {
    let content = fs::read_to_string(path)?;
    let mut lines = content.lines().enumerate();
    let (_, header_line) = lines
        .next()
        .ok_or_else(|| format_err(path, 1, "empty embedding file".to_string()))?;
    let header: EmbeddingHeader = serde_json::from_str(header_line)
        .map_err(|e| format_err(path, 1, format!("bad header: {e}")))?;
    if header.format_version != EMBEDDING_FORMAT_VERSION {
        return Err(format_err(
            path,
            1,
            format!(
                "unsupported format version {} (expected {EMBEDDING_FORMAT_VERSION})",
                header.format_version
            ),
        ));
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(header.count);
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let record: EmbeddingRecord = serde_json::from_str(line)
            .map_err(|e| format_err(path, lineno, format!("bad record: {e}")))?;
        if record.index != rows.len() {
            return Err(format_err(
                path,
                lineno,
                format!("index {} out of order (expected {})", record.index, rows.len()),
            ));
        }
        if record.vector.len() != header.dim {
            return Err(format_err(
                path,
                lineno,
                format!(
                    "vector has {} values but header says {}",
                    record.vector.len(),
                    header.dim
                ),
            ));
        }
        if record.vector.iter().any(|v| !v.is_finite()) {
            return Err(format_err(path, lineno, "non-finite value".to_string()));
        }
        rows.push(record.vector);
    }
    if rows.len() != header.count {
        return Err(format_err(
            path,
            1,
            format!("header count {} but {} rows present", header.count, rows.len()),
        ));
    }
    let matrix = EmbeddingMatrix::from_rows(rows)?;
    Ok(EmbeddingFile {
        model: header.model,
        provider: header.provider,
        dataset_fingerprint: header.dataset_fingerprint,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_matrix() -> EmbeddingMatrix {
        EmbeddingMatrix::from_rows(vec![
            vec![0.1, -0.0, 1e-300],
            vec![2.0, 3.0, 4.0],
        ])
        .unwrap()
    }

    #[test]
    fn embeddings_round_trip_bit_for_bit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.jsonl");
        let model = ModelRef::parse("voyage-3.5@3").unwrap();
        let matrix = sample_matrix();
        write_embeddings(&path, &model, &matrix, "fp123").unwrap();
        let loaded = read_embeddings(&path).unwrap();
        assert_eq!(loaded.model, "voyage-3.5@3");
        assert_eq!(loaded.provider, Provider::Voyage);
        assert_eq!(loaded.dataset_fingerprint, "fp123");
        assert_eq!(loaded.matrix.dim(), 3);
        for (a, b) in loaded.matrix.rows().iter().zip(matrix.rows()) {
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn out_of_order_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.jsonl");
        let model = ModelRef::parse("voyage-3.5").unwrap();
        write_embeddings(&path, &model, &sample_matrix(), "fp").unwrap();
        let content = fs::read_to_string(&path).unwrap();
        let swapped = content
            .replace("\"index\":0", "\"index\":9")
            .replace("\"index\":1", "\"index\":0")
            .replace("\"index\":9", "\"index\":1");
        fs::write(&path, swapped).unwrap();
        assert!(read_embeddings(&path).is_err());
    }

    #[test]
    fn dimension_drift_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.jsonl");
        let model = ModelRef::parse("voyage-3.5").unwrap();
        write_embeddings(&path, &model, &sample_matrix(), "fp").unwrap();
        let content = fs::read_to_string(&path).unwrap();
        let chopped = content.replace("[2.0,3.0,4.0]", "[2.0,3.0]");
        assert_ne!(content, chopped);
        fs::write(&path, chopped).unwrap();
        assert!(read_embeddings(&path).is_err());
    }

    #[test]
    fn truncation_is_detected_by_count() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.jsonl");
        let model = ModelRef::parse("voyage-3.5").unwrap();
        write_embeddings(&path, &model, &sample_matrix(), "fp").unwrap();
        let content = fs::read_to_string(&path).unwrap();
        let truncated: Vec<&str> = content.lines().take(2).collect();
        fs::write(&path, truncated.join("\n")).unwrap();
        assert!(read_embeddings(&path).is_err());
    }

    #[test]
    fn fingerprints_distinguish_content_and_boundaries() {
        assert_ne!(dataset_fingerprint(b"abc"), dataset_fingerprint(b"abd"));
        let ab_c = texts_fingerprint(&["ab".to_string(), "c".to_string()]);
        let a_bc = texts_fingerprint(&["a".to_string(), "bc".to_string()]);
        assert_ne!(ab_c, a_bc);
        assert_eq!(
            texts_fingerprint(&["x".to_string()]),
            texts_fingerprint(&["x".to_string()])
        );
    }
}
