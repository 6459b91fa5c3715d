//! `numprobe report`: summarize sweep files into per-family tables.

use crate::config::Settings;
use crate::errors::CliError;
use crate::paths::OutTree;
use numprobe::metrics::{read_sweep, SweepResult};
use numprobe::numgen::Family;
use numprobe::report::{render_table, write_text_atomic, TableDoc};

/// Load the sweep of every configured model for one family, with a
/// workflow hint when a sweep is missing.
pub fn load_family_sweeps(
    settings: &Settings,
    tree: &OutTree,
    family: Family,
) -> Result<Vec<SweepResult>, CliError> {
    let mut sweeps = Vec::with_capacity(settings.models.len());
    for model in &settings.models {
        let path = tree.sweep_path(model, family);
        if !path.exists() {
            return Err(CliError::Config(format!(
                "no sweep at {}: run `numprobe evaluate` first",
                path.display()
            )));
        }
        sweeps.push(read_sweep(&path)?);
    }
    Ok(sweeps)
}

pub fn run(settings: &Settings) -> Result<(), CliError> {
    settings.require_models()?;
    let tree = OutTree::new(&settings.out);
    if settings.dry_run {
        for &family in &settings.families {
            for &format in &settings.formats {
                println!("plan table {}", tree.table_path(family, format).display());
            }
        }
        return Ok(());
    }
    for &family in &settings.families {
        let sweeps = load_family_sweeps(settings, &tree, family)?;
        let doc = TableDoc::from_sweeps(&sweeps)?;
        for &format in &settings.formats {
            let path = tree.table_path(family, format);
            write_text_atomic(&path, &render_table(&doc, format))?;
            println!("table {} -> {}", family.name(), path.display());
        }
    }
    Ok(())
}
