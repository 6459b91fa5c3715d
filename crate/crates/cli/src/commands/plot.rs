//! `numprobe plot`: metric curves per family plus magnitude scatters per
//! model.

use super::{build_embedder, open_cache};
use crate::commands::report::load_family_sweeps;
use crate::config::Settings;
use crate::errors::CliError;
use crate::paths::OutTree;
use numprobe::metrics::MetricKind;
use numprobe::report::{magnitude_scatter_figures, metric_curve_svg, write_text_atomic};

const SCATTER_STEMS: [&str; 2] = ["magnitude-nonneg", "magnitude-signed"];

pub fn run(settings: &Settings) -> Result<(), CliError> {
    settings.require_models()?;
    let tree = OutTree::new(&settings.out);
    if settings.dry_run {
        for &family in &settings.families {
            for kind in MetricKind::ALL {
                println!("plan figure {}", tree.curve_path(kind, family).display());
            }
        }
        for model in &settings.models {
            for stem in SCATTER_STEMS {
                println!("plan figure {}", tree.scatter_path(model, stem).display());
            }
        }
        return Ok(());
    }
    for &family in &settings.families {
        let sweeps = load_family_sweeps(settings, &tree, family)?;
        for kind in MetricKind::ALL {
            let path = tree.curve_path(kind, family);
            write_text_atomic(&path, &metric_curve_svg(kind, &sweeps)?)?;
            println!("figure {} -> {}", kind.name(), path.display());
        }
    }
    let cache = open_cache(settings)?;
    for model in &settings.models {
        let embedder = build_embedder(model, settings)?;
        let figures = magnitude_scatter_figures(
            embedder.as_ref(),
            cache.as_ref(),
            settings.magnitude_bound as i128,
            settings.seed,
        )?;
        for figure in figures {
            let path = tree.scatter_path(model, &figure.stem);
            write_text_atomic(&path, &figure.svg)?;
            println!("figure {} -> {}", figure.stem, path.display());
        }
    }
    Ok(())
}
