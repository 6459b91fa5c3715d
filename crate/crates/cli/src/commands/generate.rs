//! `numprobe generate`: write one dataset file per family and precision
//! level.

use super::dataset_for;
use crate::config::Settings;
use crate::errors::CliError;
use crate::paths::OutTree;
use numprobe::numgen::write_dataset;

pub fn run(settings: &Settings) -> Result<(), CliError> {
    let tree = OutTree::new(&settings.out);
    let mut written = 0usize;
    for &family in &settings.families {
        for &level in &settings.levels {
            let path = tree.dataset_path(family, level);
            if settings.dry_run {
                println!("plan dataset {}", path.display());
                continue;
            }
            let ds = dataset_for(settings, family, level)?;
            write_dataset(&ds, &path)?;
            println!(
                "dataset {} {}={} size={} -> {}",
                family.name(),
                family.precision_symbol(),
                level,
                ds.size(),
                path.display()
            );
            written += 1;
        }
    }
    if !settings.dry_run {
        println!("generated {written} datasets");
    }
    Ok(())
}
