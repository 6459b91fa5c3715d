//! `numprobe embed`: run every model over every dataset and write
//! embedding files stamped with the dataset fingerprint. `--dry-run`
//! prints the request budget instead of calling anyone.

use super::{build_embedder, dataset_for, embed_rows, open_cache};
use crate::config::Settings;
use crate::errors::CliError;
use crate::paths::OutTree;
use numprobe::numgen::{dataset_to_string, PrecisionSpec};
use numprobe::providers::{dataset_fingerprint, write_embeddings, EmbeddingMatrix};
use numprobe::Provider;

fn dry_run(settings: &Settings) -> Result<(), CliError> {
    let mut grand_texts = 0u128;
    let mut grand_requests = 0u128;
    for model in &settings.models {
        let mut texts = 0u128;
        let batch = settings.provider_options(model.provider()).batch_size as u128;
        // Each dataset is embedded on its own, so batches never span
        // datasets.
        let mut requests = 0u128;
        for &family in &settings.families {
            for &level in &settings.levels {
                let spec = PrecisionSpec::new(family, level)?;
                let t = spec.grid_size().min(settings.n as u128);
                texts += t;
                requests += t.div_ceil(batch);
            }
        }
        if model.provider() == Provider::Synthetic {
            println!(
                "plan {}: {} texts, 0 requests (synthetic, in-process)",
                model.canonical(),
                texts
            );
        } else {
            println!(
                "plan {}: {} texts, {} requests of <= {} texts",
                model.canonical(),
                texts,
                requests,
                batch
            );
            grand_requests += requests;
        }
        grand_texts += texts;
    }
    println!("plan total: {grand_texts} texts, {grand_requests} requests");
    Ok(())
}

pub fn run(settings: &Settings) -> Result<(), CliError> {
    settings.require_models()?;
    if settings.dry_run {
        return dry_run(settings);
    }
    let tree = OutTree::new(&settings.out);
    let cache = open_cache(settings)?;
    for model in &settings.models {
        let embedder = build_embedder(model, settings)?;
        for &family in &settings.families {
            for &level in &settings.levels {
                let ds = dataset_for(settings, family, level)?;
                let fingerprint = dataset_fingerprint(dataset_to_string(&ds).as_bytes());
                let rows = embed_rows(embedder.as_ref(), cache.as_ref(), &ds.texts())?;
                let matrix = EmbeddingMatrix::from_rows(rows)?;
                let path = tree.embedding_path(model, family, level);
                write_embeddings(&path, model, &matrix, &fingerprint)?;
                println!(
                    "embedded {} {} {}={} rows={} dim={} -> {}",
                    model.canonical(),
                    family.name(),
                    family.precision_symbol(),
                    level,
                    matrix.len(),
                    matrix.dim(),
                    path.display()
                );
            }
        }
    }
    Ok(())
}
