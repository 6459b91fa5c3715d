//! Precision sweeps: the same evaluation repeated across precision levels,
//! plus a line-oriented file format for the results.

use super::{eval_triple, EvalOptions, MetricKind, MetricResult, MetricTriple, MetricsError};
use crate::numgen::{dataset_seed, fold_seed, generate, kfold_split, Family, PrecisionSpec};
use crate::providers::{cached_embed, CacheStore, Embedder, EmbeddingMatrix, Provider};
use serde::{Deserialize, Serialize};
use std::io::Write as _;
use std::path::Path;

/// Bumped when the sweep file layout changes incompatibly.
pub const SWEEP_FORMAT_VERSION: u32 = 1;

/// Settings for a precision sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    /// Samples requested per precision level (capped by the grid size).
    pub n: usize,
    /// Number of cross-validation folds.
    pub k: usize,
    /// Master seed; per-level dataset and fold seeds are derived from it.
    pub seed: u64,
    /// Shared evaluation settings.
    pub eval: EvalOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            n: 500,
            k: 5,
            seed: 0,
            eval: EvalOptions::default(),
        }
    }
}

/// Reproducibility record for one sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepManifest {
    pub model: String,
    pub provider: Provider,
    pub family: Family,
    pub levels: Vec<u32>,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub rcond: f64,
    pub ridge: Option<f64>,
    pub normalize: bool,
    pub global_pca: bool,
    pub format_version: u32,
}

/// One evaluated precision level.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub level: u32,
    /// Actual dataset size after grid capping.
    pub dataset_size: usize,
    pub triple: MetricTriple,
}

/// A full sweep: provenance plus one point per precision level.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub manifest: SweepManifest,
    pub points: Vec<SweepPoint>,
}

/// Generate, embed, and evaluate one dataset per precision level.
///
/// Dataset and fold seeds are derived from `opts.seed` per level, so any
/// subset of levels reproduces exactly the same numbers as the full run.
/// With a cache, embeddings are fetched through it; otherwise the embedder
/// is called directly.
pub fn run_sweep(
    family: Family,
    levels: &[u32],
    embedder: &dyn Embedder,
    cache: Option<&CacheStore>,
    opts: &SweepOptions,
) -> Result<SweepResult, MetricsError> {
    if levels.is_empty() {
        return Err(MetricsError::EmptyLevels);
    }
    let model = embedder.model();
    let mut points = Vec::with_capacity(levels.len());
    for &level in levels {
        let spec = PrecisionSpec::new(family, level)?;
        let ds = generate(spec, opts.n, dataset_seed(opts.seed, family, level, opts.n))?;
        let texts = ds.texts();
        let rows = match cache {
            Some(store) => cached_embed(store, embedder, &texts)?,
            None => embedder.embed_texts(&texts)?,
        };
        let matrix = EmbeddingMatrix::from_rows(rows)?;
        let folds = kfold_split(
            ds.size(),
            opts.k,
            fold_seed(opts.seed, family, level, opts.n, opts.k),
        )?;
        let triple = eval_triple(&matrix, &ds.values(), &folds, &opts.eval)?;
        points.push(SweepPoint {
            level,
            dataset_size: ds.size(),
            triple,
        });
    }
    Ok(SweepResult {
        manifest: SweepManifest {
            model: model.canonical(),
            provider: model.provider(),
            family,
            levels: levels.to_vec(),
            n: opts.n,
            k: opts.k,
            seed: opts.seed,
            rcond: opts.eval.rcond,
            ridge: opts.eval.ridge,
            normalize: opts.eval.normalize,
            global_pca: opts.eval.global_pca,
            format_version: SWEEP_FORMAT_VERSION,
        },
        points,
    })
}

/// One metric at one level, as carried into summaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStat {
    pub level: u32,
    pub mean: f64,
    pub std: f64,
}

/// The extremes of one metric across the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub min: SummaryStat,
    pub max: SummaryStat,
}

/// Min/max (by mean) of each metric across precision levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub linear_r2: MetricSummary,
    pub pca_r2: MetricSummary,
    pub pca_vr: MetricSummary,
}

impl SweepSummary {
    pub fn get(&self, kind: MetricKind) -> &MetricSummary {
        match kind {
            MetricKind::LinearR2 => &self.linear_r2,
            MetricKind::PcaR2 => &self.pca_r2,
            MetricKind::PcaVarianceRatio => &self.pca_vr,
        }
    }
}

fn summarize_metric(points: &[SweepPoint], kind: MetricKind) -> MetricSummary {
    let stat = |p: &SweepPoint| {
        let r = p.triple.get(kind);
        SummaryStat {
            level: p.level,
            mean: r.mean,
            std: r.std,
        }
    };
    let mut min = stat(&points[0]);
    let mut max = stat(&points[0]);
    for p in &points[1..] {
        let s = stat(p);
        if s.mean < min.mean {
            min = s;
        }
        if s.mean > max.mean {
            max = s;
        }
    }
    MetricSummary { min, max }
}

/// Reduce a sweep to per-metric extremes across its levels.
pub fn min_max_summary(sweep: &SweepResult) -> Result<SweepSummary, MetricsError> {
    if sweep.points.is_empty() {
        return Err(MetricsError::EmptyLevels);
    }
    Ok(SweepSummary {
        linear_r2: summarize_metric(&sweep.points, MetricKind::LinearR2),
        pca_r2: summarize_metric(&sweep.points, MetricKind::PcaR2),
        pca_vr: summarize_metric(&sweep.points, MetricKind::PcaVarianceRatio),
    })
}

#[derive(Serialize, Deserialize)]
struct ValueRecord {
    level: u32,
    metric: String,
    fold: usize,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct SizeRecord {
    level: u32,
    size: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SweepRecord {
    Value(ValueRecord),
    Size(SizeRecord),
}

fn format_err(path: &Path, line: usize, detail: String) -> MetricsError {
    MetricsError::Numgen(crate::numgen::NumgenError::Parse {
        line,
        detail: format!("{}: {detail}", path.display()),
    })
}

/// Serialize a sweep: a manifest line, then per level a size line followed
/// by one line per retained fold value.
pub fn sweep_to_string(sweep: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str(&serde_json::to_string(&sweep.manifest).expect("manifest serializes"));
    out.push('\n');
    for p in &sweep.points {
        let size = SweepRecord::Size(SizeRecord {
            level: p.level,
            size: p.dataset_size,
        });
        out.push_str(&serde_json::to_string(&size).expect("record serializes"));
        out.push('\n');
        for kind in MetricKind::ALL {
            let r = p.triple.get(kind);
            for (fold, value) in r.fold_ids.iter().zip(&r.fold_values) {
                let rec = SweepRecord::Value(ValueRecord {
                    level: p.level,
                    metric: kind.name().to_string(),
                    fold: *fold,
                    value: *value,
                });
                out.push_str(&serde_json::to_string(&rec).expect("record serializes"));
                out.push('\n');
            }
        }
    }
    out
}

/// Write a sweep file atomically (via a temporary file in the same
/// directory).
pub fn write_sweep(path: &Path, sweep: &SweepResult) -> Result<(), MetricsError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir).map_err(crate::numgen::NumgenError::from)?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or_else(|| Path::new(".")))
        .map_err(crate::numgen::NumgenError::from)?;
    tmp.write_all(sweep_to_string(sweep).as_bytes())
        .map_err(crate::numgen::NumgenError::from)?;
    tmp.persist(path)
        .map_err(|e| crate::numgen::NumgenError::from(e.error))?;
    Ok(())
}

/// Read a sweep file back, rebuilding fold aggregates and validating the
/// records against the manifest.
pub fn read_sweep(path: &Path) -> Result<SweepResult, MetricsError> {
    let text = std::fs::read_to_string(path).map_err(crate::numgen::NumgenError::from)?;
    let mut lines = text.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| format_err(path, 1, "empty sweep file".into()))?;
    let manifest: SweepManifest = serde_json::from_str(first)
        .map_err(|e| format_err(path, 1, format!("bad manifest: {e}")))?;
    if manifest.format_version != SWEEP_FORMAT_VERSION {
        return Err(format_err(
            path,
            1,
            format!(
                "format version {} unsupported (expected {SWEEP_FORMAT_VERSION})",
                manifest.format_version
            ),
        ));
    }

    struct Partial {
        size: usize,
        folds: [Vec<(usize, f64)>; 3],
    }
    let mut order: Vec<u32> = Vec::new();
    let mut partials: std::collections::HashMap<u32, Partial> = std::collections::HashMap::new();

    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: SweepRecord = serde_json::from_str(line)
            .map_err(|e| format_err(path, lineno, format!("bad record: {e}")))?;
        match record {
            SweepRecord::Size(s) => {
                if !manifest.levels.contains(&s.level) {
                    return Err(format_err(
                        path,
                        lineno,
                        format!("level {} not in manifest", s.level),
                    ));
                }
                if partials.contains_key(&s.level) {
                    return Err(format_err(
                        path,
                        lineno,
                        format!("duplicate level {}", s.level),
                    ));
                }
                order.push(s.level);
                partials.insert(
                    s.level,
                    Partial {
                        size: s.size,
                        folds: [Vec::new(), Vec::new(), Vec::new()],
                    },
                );
            }
            SweepRecord::Value(v) => {
                let kind = MetricKind::parse(&v.metric).ok_or_else(|| {
                    format_err(path, lineno, format!("unknown metric {:?}", v.metric))
                })?;
                if v.fold >= manifest.k {
                    return Err(format_err(
                        path,
                        lineno,
                        format!("fold {} out of range for k={}", v.fold, manifest.k),
                    ));
                }
                let partial = partials.get_mut(&v.level).ok_or_else(|| {
                    format_err(path, lineno, format!("value before size for level {}", v.level))
                })?;
                let slot = MetricKind::ALL.iter().position(|k| *k == kind).unwrap();
                partial.folds[slot].push((v.fold, v.value));
            }
        }
    }

    let mut points = Vec::with_capacity(order.len());
    for level in &order {
        let partial = partials.remove(level).unwrap();
        let mut results: Vec<MetricResult> = Vec::with_capacity(3);
        for (slot, kind) in MetricKind::ALL.into_iter().enumerate() {
            let pairs = &partial.folds[slot];
            if pairs.is_empty() {
                return Err(format_err(
                    path,
                    0,
                    format!("level {level}: no {} records", kind.name()),
                ));
            }
            let (ids, values): (Vec<usize>, Vec<f64>) = pairs.iter().copied().unzip();
            results.push(MetricResult::from_folds(kind, ids, values)?);
        }
        let pca_vr = results.pop().unwrap();
        let pca_r2 = results.pop().unwrap();
        let linear_r2 = results.pop().unwrap();
        points.push(SweepPoint {
            level: *level,
            dataset_size: partial.size,
            triple: MetricTriple {
                linear_r2,
                pca_r2,
                pca_vr,
            },
        });
    }
    Ok(SweepResult { manifest, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::providers::{ModelRef, SyntheticEmbedder};
    use approx::assert_relative_eq;

    fn embedder(spec: &str) -> SyntheticEmbedder {
        SyntheticEmbedder::new(&ModelRef::parse(spec).unwrap()).unwrap()
    }

    fn small_sweep() -> SweepResult {
        let e = embedder("synthetic:linear/d=12/sigma=0.1");
        run_sweep(
            Family::PositiveDecimals,
            &[1, 2, 3],
            &e,
            None,
            &SweepOptions {
                n: 60,
                k: 4,
                seed: 5,
                ..SweepOptions::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn sweep_covers_levels_and_caps_tiny_grids() {
        let s = small_sweep();
        assert_eq!(s.manifest.model, "synthetic:linear/d=12/seed=0/sigma=0.1");
        assert_eq!(s.manifest.provider, Provider::Synthetic);
        assert_eq!(s.points.len(), 3);
        assert_eq!(s.points[0].level, 1);
        // Level 1 has an 11-point grid; 60 requested caps to 11.
        assert_eq!(s.points[0].dataset_size, 11);
        assert_eq!(s.points[1].dataset_size, 60);
        for p in &s.points {
            assert!(p.triple.linear_r2.mean > 0.8, "level {}", p.level);
        }
    }

    #[test]
    fn sweep_is_deterministic_for_a_given_seed() {
        let a = small_sweep();
        let b = small_sweep();
        assert_eq!(a, b);
        let e = embedder("synthetic:linear/d=12/sigma=0.1");
        let c = run_sweep(
            Family::PositiveDecimals,
            &[1, 2, 3],
            &e,
            None,
            &SweepOptions {
                n: 60,
                k: 4,
                seed: 6,
                ..SweepOptions::default()
            },
        )
        .unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn a_sub_sweep_reproduces_the_same_points() {
        let full = small_sweep();
        let e = embedder("synthetic:linear/d=12/sigma=0.1");
        let sub = run_sweep(
            Family::PositiveDecimals,
            &[2],
            &e,
            None,
            &SweepOptions {
                n: 60,
                k: 4,
                seed: 5,
                ..SweepOptions::default()
            },
        )
        .unwrap();
        assert_eq!(sub.points[0], full.points[1]);
    }

    #[test]
    fn empty_level_list_is_rejected() {
        let e = embedder("synthetic:linear/d=4");
        assert!(matches!(
            run_sweep(
                Family::PositiveDecimals,
                &[],
                &e,
                None,
                &SweepOptions::default()
            ),
            Err(MetricsError::EmptyLevels)
        ));
    }

    #[test]
    fn summary_picks_extremes_with_their_levels() {
        let s = small_sweep();
        let summary = min_max_summary(&s).unwrap();
        for kind in MetricKind::ALL {
            let m = summary.get(kind);
            assert!(m.min.mean <= m.max.mean);
            assert!(s.manifest.levels.contains(&m.min.level));
            assert!(s.manifest.levels.contains(&m.max.level));
            let means: Vec<f64> = s.points.iter().map(|p| p.triple.get(kind).mean).collect();
            let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert_relative_eq!(m.min.mean, lo);
            assert_relative_eq!(m.max.mean, hi);
        }
    }

    #[test]
    fn sweep_file_round_trips_exactly() {
        let s = small_sweep();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.jsonl");
        write_sweep(&path, &s).unwrap();
        let back = read_sweep(&path).unwrap();
        assert_eq!(s.manifest, back.manifest);
        assert_eq!(s.points.len(), back.points.len());
        for (a, b) in s.points.iter().zip(&back.points) {
            assert_eq!(a.level, b.level);
            assert_eq!(a.dataset_size, b.dataset_size);
            for kind in MetricKind::ALL {
                let (ra, rb) = (a.triple.get(kind), b.triple.get(kind));
                assert_eq!(ra.fold_ids, rb.fold_ids);
                assert_eq!(ra.fold_values, rb.fold_values);
                assert_eq!(ra.mean.to_bits(), rb.mean.to_bits());
                assert_eq!(ra.std.to_bits(), rb.std.to_bits());
            }
        }
    }

    #[test]
    fn sweep_serialization_is_byte_stable() {
        let s = small_sweep();
        assert_eq!(sweep_to_string(&s), sweep_to_string(&s));
    }

    #[test]
    fn corrupt_sweep_files_are_rejected_with_location() {
        let s = small_sweep();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.jsonl");

        let mut text = sweep_to_string(&s);
        text.push_str("{\"level\":9,\"size\":10}\n");
        std::fs::write(&path, &text).unwrap();
        let err = read_sweep(&path).unwrap_err().to_string();
        assert!(err.contains("level 9"), "{err}");

        let text = sweep_to_string(&s)
            .replace("\"metric\":\"pca-r2\"", "\"metric\":\"mystery\"");
        std::fs::write(&path, &text).unwrap();
        let err = read_sweep(&path).unwrap_err().to_string();
        assert!(err.contains("mystery"), "{err}");

        let text = sweep_to_string(&s).replace("\"fold\":3", "\"fold\":12");
        std::fs::write(&path, &text).unwrap();
        let err = read_sweep(&path).unwrap_err().to_string();
        assert!(err.contains("out of range"), "{err}");

        std::fs::write(&path, "").unwrap();
        assert!(read_sweep(&path).is_err());
    }

    #[test]
    fn cache_backed_sweep_matches_direct_sweep() {
        let e = embedder("synthetic:linear/d=8/sigma=0.2");
        let dir = tempfile::tempdir().unwrap();
        let store = CacheStore::open(dir.path()).unwrap();
        let opts = SweepOptions {
            n: 40,
            k: 3,
            seed: 2,
            ..SweepOptions::default()
        };
        let direct = run_sweep(Family::MixedSignDecimals, &[2], &e, None, &opts).unwrap();
        let cached = run_sweep(Family::MixedSignDecimals, &[2], &e, Some(&store), &opts).unwrap();
        let warm = run_sweep(Family::MixedSignDecimals, &[2], &e, Some(&store), &opts).unwrap();
        assert_eq!(direct.points, cached.points);
        assert_eq!(direct.points, warm.points);
    }
}
