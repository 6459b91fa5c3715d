//! Rendering evaluated sweeps into deliverables: summary tables in
//! Markdown/CSV/LaTeX and deterministic SVG figures.
//!
//! Everything here is a pure function from results to bytes, plus one
//! atomic file writer; identical inputs always render identical output.

mod figure;
mod svg;
mod table;

pub use figure::{magnitude_scatter_figures, metric_curve_svg, pca_scatter_svg, NamedFigure};
pub use svg::{colormap, SERIES_PALETTE};
pub use table::{render_table, TableDoc, TableFormat, TableRow};

use crate::metrics::MetricsError;
use crate::numerics::NumericsError;
use crate::numgen::{Family, NumgenError};
use crate::providers::ProviderError;
use std::io::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("nothing to render")]
    EmptyInput,
    #[error("mixed families: {} vs {}", first.name(), other.name())]
    MixedFamilies { first: Family, other: Family },
    #[error("duplicate model {model:?}")]
    DuplicateModel { model: String },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Numgen(#[from] NumgenError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Write `content` to `path` through a temporary file in the same
/// directory, so readers never observe a half-written file.
pub fn write_text_atomic(path: &Path, content: &str) -> Result<(), ReportError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or_else(|| Path::new(".")))?;
    tmp.write_all(content.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
