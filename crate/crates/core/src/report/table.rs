//! Summary tables: one row per model, min/max of each metric across the
//! precision sweep, rendered to Markdown, CSV, or LaTeX.

use super::ReportError;
use crate::metrics::{min_max_summary, MetricKind, SweepResult, SweepSummary};
use crate::numgen::Family;
use crate::providers::Provider;

/// Output syntax for a rendered table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
    Latex,
}

impl TableFormat {
    pub const ALL: [TableFormat; 3] = [TableFormat::Markdown, TableFormat::Csv, TableFormat::Latex];

    pub fn parse(s: &str) -> Option<TableFormat> {
        match s {
            "md" | "markdown" => Some(TableFormat::Markdown),
            "csv" => Some(TableFormat::Csv),
            "tex" | "latex" => Some(TableFormat::Latex),
            _ => None,
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            TableFormat::Markdown => "md",
            TableFormat::Csv => "csv",
            TableFormat::Latex => "tex",
        }
    }
}

/// One model's summarized sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub model: String,
    pub provider: Provider,
    pub summary: SweepSummary,
}

/// A family's summary table, rows ordered by provider then model name.
#[derive(Debug, Clone, PartialEq)]
pub struct TableDoc {
    pub family: Family,
    pub rows: Vec<TableRow>,
}

impl TableDoc {
    /// Summarize one sweep per model into a table. All sweeps must share a
    /// family and models must be distinct.
    pub fn from_sweeps(sweeps: &[SweepResult]) -> Result<TableDoc, ReportError> {
        let first = sweeps.first().ok_or(ReportError::EmptyInput)?;
        let family = first.manifest.family;
        let mut rows = Vec::with_capacity(sweeps.len());
        for sweep in sweeps {
            if sweep.manifest.family != family {
                return Err(ReportError::MixedFamilies {
                    first: family,
                    other: sweep.manifest.family,
                });
            }
            if rows
                .iter()
                .any(|r: &TableRow| r.model == sweep.manifest.model)
            {
                return Err(ReportError::DuplicateModel {
                    model: sweep.manifest.model.clone(),
                });
            }
            rows.push(TableRow {
                model: sweep.manifest.model.clone(),
                provider: sweep.manifest.provider,
                summary: min_max_summary(sweep)?,
            });
        }
        rows.sort_by(|a, b| (a.provider, &a.model).cmp(&(b.provider, &b.model)));
        Ok(TableDoc { family, rows })
    }
}

/// `mean ± std` with two decimals and no negative zero.
fn cell(mean: f64, std: f64, sep: &str) -> String {
    let fix = |v: f64| {
        let s = format!("{v:.2}");
        if s == "-0.00" {
            "0.00".to_string()
        } else {
            s
        }
    };
    format!("{}{sep}{}", fix(mean), fix(std))
}

fn metric_header(kind: MetricKind, format: TableFormat) -> &'static str {
    match (kind, format) {
        (MetricKind::LinearR2, TableFormat::Latex) => "Linear $R^2$",
        (MetricKind::PcaR2, TableFormat::Latex) => "PCA $R^2$",
        (MetricKind::PcaVarianceRatio, TableFormat::Latex) => "PCA Variance",
        (MetricKind::LinearR2, TableFormat::Csv) => "Linear R2",
        (MetricKind::PcaR2, TableFormat::Csv) => "PCA R2",
        (MetricKind::PcaVarianceRatio, TableFormat::Csv) => "PCA Variance",
        (kind, _) => kind.label(),
    }
}

fn latex_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '_' | '%' | '&' | '#' | '$' => {
                out.push('\\');
                out.push(c);
            }
            _ => out.push(c),
        }
    }
    out
}

/// Render the table in the requested syntax. Columns are the min and max of
/// each metric over the sweep's precision levels.
pub fn render_table(doc: &TableDoc, format: TableFormat) -> String {
    let headers: Vec<String> = {
        let mut h = vec!["Model".to_string()];
        for kind in MetricKind::ALL {
            let base = metric_header(kind, format);
            h.push(format!("{base} (min)"));
            h.push(format!("{base} (max)"));
        }
        h
    };
    let sep = match format {
        TableFormat::Latex => " $\\pm$ ",
        _ => " ± ",
    };
    let rows: Vec<Vec<String>> = doc
        .rows
        .iter()
        .map(|row| {
            let mut cells = vec![match format {
                TableFormat::Latex => latex_escape(&row.model),
                _ => row.model.clone(),
            }];
            for kind in MetricKind::ALL {
                let m = row.summary.get(kind);
                cells.push(cell(m.min.mean, m.min.std, sep));
                cells.push(cell(m.max.mean, m.max.std, sep));
            }
            cells
        })
        .collect();

    match format {
        TableFormat::Markdown => {
            let mut out = String::new();
            out.push_str(&format!("| {} |\n", headers.join(" | ")));
            out.push_str(&format!(
                "|{}|\n",
                headers.iter().map(|_| " --- ").collect::<Vec<_>>().join("|")
            ));
            for r in &rows {
                out.push_str(&format!("| {} |\n", r.join(" | ")));
            }
            out
        }
        TableFormat::Csv => {
            let mut out = String::new();
            out.push_str(&format!("{}\n", headers.join(",")));
            for r in &rows {
                out.push_str(&format!("{}\n", r.join(",")));
            }
            out
        }
        TableFormat::Latex => {
            let mut out = String::new();
            let spec = format!("l{}", "c".repeat(headers.len() - 1));
            out.push_str(&format!("\\begin{{tabular}}{{{spec}}}\n\\hline\n"));
            out.push_str(&format!("{} \\\\\n\\hline\n", headers.join(" & ")));
            for r in &rows {
                out.push_str(&format!("{} \\\\\n", r.join(" & ")));
            }
            out.push_str("\\hline\n\\end{tabular}\n");
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{
        MetricResult, MetricTriple, SweepManifest, SweepPoint, SWEEP_FORMAT_VERSION,
    };

    fn result(kind: MetricKind, values: &[f64]) -> MetricResult {
        MetricResult::from_folds(kind, (0..values.len()).collect(), values.to_vec()).unwrap()
    }

    fn point(level: u32, linear: f64, pca: f64, vr: f64) -> SweepPoint {
        SweepPoint {
            level,
            dataset_size: 100,
            triple: MetricTriple {
                linear_r2: result(MetricKind::LinearR2, &[linear, linear + 0.02]),
                pca_r2: result(MetricKind::PcaR2, &[pca, pca]),
                pca_vr: result(MetricKind::PcaVarianceRatio, &[vr, vr]),
            },
        }
    }

    fn sweep(model: &str, provider: Provider, family: Family) -> SweepResult {
        SweepResult {
            manifest: SweepManifest {
                model: model.to_string(),
                provider,
                family,
                levels: vec![1, 2],
                n: 100,
                k: 2,
                seed: 0,
                rcond: 1e-12,
                ridge: None,
                normalize: false,
                global_pca: false,
                format_version: SWEEP_FORMAT_VERSION,
            },
            points: vec![point(1, 0.90, 0.50, 0.30), point(2, 0.84, 0.61, 0.25)],
        }
    }

    #[test]
    fn rows_sort_by_provider_then_name() {
        let doc = TableDoc::from_sweeps(&[
            sweep("synthetic:linear/d=4/seed=0/sigma=0", Provider::Synthetic, Family::PositiveDecimals),
            sweep("voyage-3-large", Provider::Voyage, Family::PositiveDecimals),
            sweep("text-embedding-3-small", Provider::OpenAi, Family::PositiveDecimals),
            sweep("gemini-embedding-001", Provider::Gemini, Family::PositiveDecimals),
            sweep("text-embedding-3-large", Provider::OpenAi, Family::PositiveDecimals),
        ])
        .unwrap();
        let models: Vec<&str> = doc.rows.iter().map(|r| r.model.as_str()).collect();
        assert_eq!(
            models,
            vec![
                "gemini-embedding-001",
                "text-embedding-3-large",
                "text-embedding-3-small",
                "voyage-3-large",
                "synthetic:linear/d=4/seed=0/sigma=0",
            ]
        );
    }

    #[test]
    fn mixed_families_and_duplicates_are_rejected() {
        assert!(matches!(
            TableDoc::from_sweeps(&[]),
            Err(ReportError::EmptyInput)
        ));
        assert!(matches!(
            TableDoc::from_sweeps(&[
                sweep("a", Provider::Voyage, Family::PositiveDecimals),
                sweep("b", Provider::Voyage, Family::MixedSignIntegers),
            ]),
            Err(ReportError::MixedFamilies { .. })
        ));
        assert!(matches!(
            TableDoc::from_sweeps(&[
                sweep("a", Provider::Voyage, Family::PositiveDecimals),
                sweep("a", Provider::Voyage, Family::PositiveDecimals),
            ]),
            Err(ReportError::DuplicateModel { .. })
        ));
    }

    #[test]
    fn markdown_render_carries_min_and_max_cells() {
        let doc =
            TableDoc::from_sweeps(&[sweep("voyage-3-large", Provider::Voyage, Family::PositiveDecimals)])
                .unwrap();
        let md = render_table(&doc, TableFormat::Markdown);
        assert!(md.starts_with("| Model | Linear R² (min) | Linear R² (max) |"));
        // Means: level 1 → 0.91 (std 0.01), level 2 → 0.85; min is level 2.
        assert!(md.contains("| 0.85 ± 0.01 | 0.91 ± 0.01 |"), "{md}");
        assert!(md.contains("voyage-3-large"));
    }

    #[test]
    fn csv_render_is_plain_ascii_headers() {
        let doc =
            TableDoc::from_sweeps(&[sweep("voyage-3-large", Provider::Voyage, Family::PositiveDecimals)])
                .unwrap();
        let csv = render_table(&doc, TableFormat::Csv);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "Model,Linear R2 (min),Linear R2 (max),PCA R2 (min),PCA R2 (max),\
             PCA Variance (min),PCA Variance (max)"
        );
        assert!(lines.next().unwrap().starts_with("voyage-3-large,0.85 ± 0.01,"));
    }

    #[test]
    fn latex_render_uses_math_pm_and_escapes() {
        let doc = TableDoc::from_sweeps(&[sweep(
            "synthetic:linear/d=4/seed=0/sigma=0",
            Provider::Synthetic,
            Family::PositiveDecimals,
        )])
        .unwrap();
        let tex = render_table(&doc, TableFormat::Latex);
        assert!(tex.starts_with("\\begin{tabular}{lcccccc}"));
        assert!(tex.contains("Linear $R^2$ (min)"));
        assert!(tex.contains("0.85 $\\pm$ 0.01"));
        assert!(tex.ends_with("\\end{tabular}\n"));
    }

    #[test]
    fn negative_zero_means_render_as_zero() {
        let mut s = sweep("m", Provider::Voyage, Family::PositiveDecimals);
        s.points = vec![SweepPoint {
            level: 1,
            dataset_size: 10,
            triple: MetricTriple {
                linear_r2: result(MetricKind::LinearR2, &[-0.001, 0.001]),
                pca_r2: result(MetricKind::PcaR2, &[-0.003, -0.003]),
                pca_vr: result(MetricKind::PcaVarianceRatio, &[0.2, 0.2]),
            },
        }];
        let doc = TableDoc::from_sweeps(&[s]).unwrap();
        let md = render_table(&doc, TableFormat::Markdown);
        assert!(!md.contains("-0.00"), "{md}");
        assert!(md.contains("0.00 ± 0.00"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let doc = TableDoc::from_sweeps(&[
            sweep("b-model", Provider::Voyage, Family::MixedSignDecimals),
            sweep("a-model", Provider::Voyage, Family::MixedSignDecimals),
        ])
        .unwrap();
        for format in TableFormat::ALL {
            assert_eq!(render_table(&doc, format), render_table(&doc, format));
        }
    }

    #[test]
    fn format_names_parse() {
        assert_eq!(TableFormat::parse("md"), Some(TableFormat::Markdown));
        assert_eq!(TableFormat::parse("markdown"), Some(TableFormat::Markdown));
        assert_eq!(TableFormat::parse("csv"), Some(TableFormat::Csv));
        assert_eq!(TableFormat::parse("tex"), Some(TableFormat::Latex));
        assert_eq!(TableFormat::parse("latex"), Some(TableFormat::Latex));
        assert_eq!(TableFormat::parse("pdf"), None);
        assert_eq!(TableFormat::Markdown.extension(), "md");
        assert_eq!(TableFormat::Latex.extension(), "tex");
    }
}
