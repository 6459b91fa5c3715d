//! `numprobe run-all`: the whole pipeline, then a manifest and an index
//! of every artifact written.

use crate::config::Settings;
use crate::errors::CliError;
use crate::manifest::{write_index, write_manifest};
use crate::paths::OutTree;

pub fn run(settings: &Settings) -> Result<(), CliError> {
    settings.require_models()?;
    super::generate::run(settings)?;
    super::embed::run(settings)?;
    super::evaluate::run(settings)?;
    super::report::run(settings)?;
    super::plot::run(settings)?;

    let tree = OutTree::new(&settings.out);
    if settings.dry_run {
        println!("plan manifest {}", tree.manifest_path().display());
        println!("plan index {}", tree.index_path().display());
        return Ok(());
    }
    write_manifest(&tree.manifest_path(), settings)?;

    // A cache nested under the output root is working state, not an
    // artifact; keep it out of the index.
    let mut exclude = Vec::new();
    if let Some(cache) = &settings.cache {
        exclude.push(cache.clone());
    }
    write_index(tree.root(), &tree.index_path(), &exclude)?;
    println!("manifest -> {}", tree.manifest_path().display());
    println!("index -> {}", tree.index_path().display());
    Ok(())
}
