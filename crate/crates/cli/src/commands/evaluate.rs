//! `numprobe evaluate`: score each model's embeddings on every dataset
//! and write one sweep file per model and family.
//!
//! Embeddings come from the files `embed` wrote, verified against the
//! regenerated dataset's fingerprint. Synthetic models may skip `embed`;
//! their vectors are computed on the fly.

use super::{build_embedder, dataset_for, embed_rows, open_cache};
use crate::config::Settings;
use crate::errors::CliError;
use crate::paths::OutTree;
use numprobe::metrics::{
    eval_triple, write_sweep, SweepManifest, SweepPoint, SweepResult,
    SWEEP_FORMAT_VERSION,
};
use numprobe::numgen::{dataset_to_string, fold_seed, kfold_split, Family, ScalarDataset};
use numprobe::providers::{dataset_fingerprint, read_embeddings, EmbeddingMatrix};
use numprobe::{ModelRef, Provider};

fn matrix_for(
    settings: &Settings,
    tree: &OutTree,
    cache: Option<&numprobe::CacheStore>,
    model: &ModelRef,
    family: Family,
    level: u32,
    ds: &ScalarDataset,
) -> Result<EmbeddingMatrix, CliError> {
    let path = tree.embedding_path(model, family, level);
    if path.exists() {
        let file = read_embeddings(&path)?;
        if file.model != model.canonical() {
            return Err(CliError::Other(format!(
                "{}: written for model {}, expected {}",
                path.display(),
                file.model,
                model.canonical()
            )));
        }
        let expected = dataset_fingerprint(dataset_to_string(ds).as_bytes());
        if file.dataset_fingerprint != expected {
            return Err(CliError::Other(format!(
                "{}: dataset fingerprint mismatch (stale embeddings? re-run `numprobe embed`)",
                path.display()
            )));
        }
        if file.matrix.len() != ds.size() {
            return Err(CliError::Other(format!(
                "{}: {} rows for a dataset of {}",
                path.display(),
                file.matrix.len(),
                ds.size()
            )));
        }
        return Ok(file.matrix);
    }
    if model.provider() == Provider::Synthetic {
        let embedder = build_embedder(model, settings)?;
        let rows = embed_rows(embedder.as_ref(), cache, &ds.texts())?;
        return Ok(EmbeddingMatrix::from_rows(rows)?);
    }
    Err(CliError::Config(format!(
        "no embeddings at {}: run `numprobe embed` first",
        path.display()
    )))
}

pub fn run(settings: &Settings) -> Result<(), CliError> {
    settings.require_models()?;
    let tree = OutTree::new(&settings.out);
    if settings.dry_run {
        for model in &settings.models {
            for &family in &settings.families {
                println!("plan sweep {}", tree.sweep_path(model, family).display());
            }
        }
        return Ok(());
    }
    let cache = open_cache(settings)?;
    for model in &settings.models {
        for &family in &settings.families {
            let mut points = Vec::with_capacity(settings.levels.len());
            for &level in &settings.levels {
                let ds = dataset_for(settings, family, level)?;
                let matrix =
                    matrix_for(settings, &tree, cache.as_ref(), model, family, level, &ds)?;
                let folds = kfold_split(
                    ds.size(),
                    settings.folds,
                    fold_seed(settings.seed, family, level, settings.n, settings.folds),
                )?;
                let triple = eval_triple(&matrix, &ds.values(), &folds, &settings.eval)?;
                points.push(SweepPoint {
                    level,
                    dataset_size: ds.size(),
                    triple,
                });
            }
            let sweep = SweepResult {
                manifest: SweepManifest {
                    model: model.canonical(),
                    provider: model.provider(),
                    family,
                    levels: settings.levels.clone(),
                    n: settings.n,
                    k: settings.folds,
                    seed: settings.seed,
                    rcond: settings.eval.rcond,
                    ridge: settings.eval.ridge,
                    normalize: settings.eval.normalize,
                    global_pca: settings.eval.global_pca,
                    format_version: SWEEP_FORMAT_VERSION,
                },
                points,
            };
            let path = tree.sweep_path(model, family);
            write_sweep(&path, &sweep)?;
            let last = sweep.points.last().expect("at least one level");
            println!(
                "evaluated {} {} levels={} (last level: linear-r2 {:.4}, pca-r2 {:.4}, \
                 pca-variance-ratio {:.4}) -> {}",
                model.canonical(),
                family.name(),
                sweep.points.len(),
                last.triple.linear_r2.mean,
                last.triple.pca_r2.mean,
                last.triple.pca_vr.mean,
                path.display()
            );
        }
    }
    Ok(())
}
