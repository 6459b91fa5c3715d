//! Dataset persistence: JSON-lines files with a header record.
//!
//! The first line describes the dataset (family, precision, seed, size); each
//! following line holds one sample with its canonical text, nearest double,
//! and exact digit decomposition. Reading validates all three against each
//! other so silent corruption cannot flow into embeddings or metrics.

use super::dataset::{Family, NumberSample, PrecisionSpec, ScalarDataset};
use super::exact::ExactDecimal;
use super::NumgenError;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

/// Version stamp written into every dataset header.
pub const DATASET_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct DatasetHeader {
    family: Family,
    /// Integer places.
    a: u32,
    /// Decimal places.
    b: u32,
    seed: u64,
    size: usize,
    format_version: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct SampleRecord {
    text: String,
    value: f64,
    sign: i8,
    int_digits: String,
    frac_digits: String,
}

/// Serialize `ds` to its on-disk text form.
pub fn dataset_to_string(ds: &ScalarDataset) -> String {
    let header = DatasetHeader {
        family: ds.spec.family(),
        a: ds.spec.int_places(),
        b: ds.spec.dec_places(),
        seed: ds.seed,
        size: ds.samples.len(),
        format_version: DATASET_FORMAT_VERSION,
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for s in &ds.samples {
        let rec = SampleRecord {
            text: s.text.clone(),
            value: s.value,
            sign: s.exact.sign(),
            int_digits: s.exact.int_digits().to_string(),
            frac_digits: s.exact.frac_digits().to_string(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("record serializes"));
        out.push('\n');
    }
    out
}

/// Write `ds` to `path`, creating parent directories as needed.
pub fn write_dataset(ds: &ScalarDataset, path: &Path) -> Result<(), NumgenError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, dataset_to_string(ds))?;
    Ok(())
}

/// Read a dataset back, re-deriving and checking every sample's canonical
/// text and double value against the stored digits.
pub fn read_dataset(path: &Path) -> Result<ScalarDataset, NumgenError> {
    let content = fs::read_to_string(path)?;
    parse_dataset(&content).map_err(|e| match e {
        NumgenError::Integrity { path: None, detail } => NumgenError::Integrity {
            path: Some(path.to_path_buf()),
            detail,
        },
        other => other,
    })
}

fn parse_dataset(content: &str) -> Result<ScalarDataset, NumgenError> {
    let mut lines = content.lines().enumerate();
    let (_, header_line) = lines.next().ok_or_else(|| NumgenError::Parse {
        line: 1,
        detail: "empty dataset file".to_string(),
    })?;
    let header: DatasetHeader =
        serde_json::from_str(header_line).map_err(|e| NumgenError::Parse {
            line: 1,
            detail: format!("bad header: {e}"),
        })?;
    if header.format_version != DATASET_FORMAT_VERSION {
        return Err(NumgenError::Integrity {
            path: None,
            detail: format!(
                "unsupported format version {} (expected {})",
                header.format_version, DATASET_FORMAT_VERSION
            ),
        });
    }
    let level = match header.family {
        Family::MixedSignIntegers => header.a,
        _ => header.b,
    };
    let spec = PrecisionSpec::new(header.family, level)?;
    if spec.int_places() != header.a || spec.dec_places() != header.b {
        return Err(NumgenError::Integrity {
            path: None,
            detail: format!(
                "header places (a={}, b={}) do not match family {}",
                header.a, header.b, header.family
            ),
        });
    }

    let mut samples = Vec::with_capacity(header.size);
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let rec: SampleRecord = serde_json::from_str(line).map_err(|e| NumgenError::Parse {
            line: lineno,
            detail: format!("bad sample: {e}"),
        })?;
        let exact = ExactDecimal::new(rec.sign, rec.int_digits, rec.frac_digits)?;
        if exact.canonical_format() != rec.text {
            return Err(NumgenError::Integrity {
                path: None,
                detail: format!(
                    "line {lineno}: text {:?} does not match digits (canonical {:?})",
                    rec.text,
                    exact.canonical_format()
                ),
            });
        }
        let derived = exact.value();
        if derived.to_bits() != rec.value.to_bits() {
            return Err(NumgenError::Integrity {
                path: None,
                detail: format!(
                    "line {lineno}: stored value {} does not match digits (derived {})",
                    rec.value, derived
                ),
            });
        }
        samples.push(NumberSample {
            text: rec.text,
            value: rec.value,
            exact,
        });
    }
    if samples.len() != header.size {
        return Err(NumgenError::Integrity {
            path: None,
            detail: format!(
                "header size {} but {} samples present",
                header.size,
                samples.len()
            ),
        });
    }
    Ok(ScalarDataset {
        spec,
        seed: header.seed,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::super::dataset::gen_mixed_sign_decimals;
    use super::*;

    #[test]
    fn round_trips_through_disk() {
        let ds = gen_mixed_sign_decimals(3, 120, 42).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("ds.jsonl");
        write_dataset(&ds, &path).unwrap();
        let back = read_dataset(&path).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn serialization_is_deterministic() {
        let ds = gen_mixed_sign_decimals(2, 50, 1).unwrap();
        assert_eq!(dataset_to_string(&ds), dataset_to_string(&ds));
    }

    #[test]
    fn tampered_text_is_rejected() {
        let ds = gen_mixed_sign_decimals(2, 10, 1).unwrap();
        let tampered = dataset_to_string(&ds).replacen("\"text\":\"", "\"text\":\"9", 1);
        let err = parse_dataset(&tampered).unwrap_err();
        assert!(matches!(err, NumgenError::Integrity { .. }), "{err}");
    }

    #[test]
    fn tampered_value_is_rejected() {
        let ds = gen_mixed_sign_decimals(2, 10, 1).unwrap();
        let text = dataset_to_string(&ds);
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        let mut rec: serde_json::Value = serde_json::from_str(&lines[1]).unwrap();
        let v = rec["value"].as_f64().unwrap();
        rec["value"] = serde_json::json!(v + 1.0);
        lines[1] = serde_json::to_string(&rec).unwrap();
        let err = parse_dataset(&lines.join("\n")).unwrap_err();
        assert!(matches!(err, NumgenError::Integrity { .. }), "{err}");
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let ds = gen_mixed_sign_decimals(2, 10, 1).unwrap();
        let text = dataset_to_string(&ds);
        let truncated: Vec<&str> = text.lines().take(5).collect();
        let err = parse_dataset(&truncated.join("\n")).unwrap_err();
        assert!(matches!(err, NumgenError::Integrity { .. }), "{err}");
    }

    #[test]
    fn unknown_format_version_is_rejected() {
        let ds = gen_mixed_sign_decimals(2, 10, 1).unwrap();
        let text = dataset_to_string(&ds).replacen("\"format_version\":1", "\"format_version\":9", 1);
        let err = parse_dataset(&text).unwrap_err();
        assert!(matches!(err, NumgenError::Integrity { .. }), "{err}");
    }

    #[test]
    fn read_error_names_the_file() {
        let ds = gen_mixed_sign_decimals(2, 10, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.jsonl");
        let tampered = dataset_to_string(&ds).replacen("\"text\":\"", "\"text\":\"9", 1);
        std::fs::write(&path, tampered).unwrap();
        let err = read_dataset(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("ds.jsonl"), "{msg}");
    }
}
