//! SVG figures: per-metric precision curves with fold-spread bands, and
//! two-component scatter plots colored by value.

use super::svg::{colormap, coord, Svg, SERIES_PALETTE};
use super::ReportError;
use crate::metrics::{MetricKind, MetricsError, SweepResult};
use crate::numerics::{pca_fit, pca_transform, pearson, NumericsError};
use crate::numgen::{derive_seed, gen_integer_range, Family};
use crate::providers::{cached_embed, CacheStore, Embedder, EmbeddingMatrix};

fn family_label(family: Family) -> &'static str {
    match family {
        Family::PositiveDecimals => "positive decimals",
        Family::MixedSignDecimals => "mixed-sign decimals",
        Family::MixedSignIntegers => "mixed-sign integers",
    }
}

fn precision_axis_label(family: Family) -> &'static str {
    match family.precision_symbol() {
        'a' => "integer digits (a)",
        _ => "decimal places (b)",
    }
}

struct LinearScale {
    lo: f64,
    hi: f64,
    out_lo: f64,
    out_hi: f64,
}

impl LinearScale {
    fn new(lo: f64, hi: f64, out_lo: f64, out_hi: f64) -> Self {
        // Degenerate domains get a symmetric pad so points land mid-range.
        let (lo, hi) = if lo == hi { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
        Self {
            lo,
            hi,
            out_lo,
            out_hi,
        }
    }

    fn map(&self, v: f64) -> f64 {
        self.out_lo + (v - self.lo) / (self.hi - self.lo) * (self.out_hi - self.out_lo)
    }
}

fn padded(lo: f64, hi: f64, frac: f64) -> (f64, f64) {
    let range = hi - lo;
    if range == 0.0 {
        (lo - 0.05, hi + 0.05)
    } else {
        (lo - range * frac, hi + range * frac)
    }
}

/// One metric across precision levels, one line per model, with a
/// ±1-standard-deviation band over the folds.
pub fn metric_curve_svg(kind: MetricKind, sweeps: &[SweepResult]) -> Result<String, ReportError> {
    let first = sweeps.first().ok_or(ReportError::EmptyInput)?;
    let family = first.manifest.family;
    for sweep in sweeps {
        if sweep.manifest.family != family {
            return Err(ReportError::MixedFamilies {
                first: family,
                other: sweep.manifest.family,
            });
        }
        if sweep.points.is_empty() {
            return Err(ReportError::EmptyInput);
        }
    }
    for (i, sweep) in sweeps.iter().enumerate() {
        if sweeps[..i]
            .iter()
            .any(|s| s.manifest.model == sweep.manifest.model)
        {
            return Err(ReportError::DuplicateModel {
                model: sweep.manifest.model.clone(),
            });
        }
    }

    const W: f64 = 900.0;
    const H: f64 = 300.0;
    const X0: f64 = 62.0;
    const X1: f64 = 730.0;
    const Y0: f64 = 34.0;
    const Y1: f64 = 254.0;

    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for sweep in sweeps {
        for p in &sweep.points {
            let r = p.triple.get(kind);
            x_lo = x_lo.min(p.level as f64);
            x_hi = x_hi.max(p.level as f64);
            y_lo = y_lo.min(r.mean - r.std);
            y_hi = y_hi.max(r.mean + r.std);
        }
    }
    let (y_lo, y_hi) = padded(y_lo, y_hi, 0.05);
    let x = LinearScale::new(x_lo, x_hi, X0, X1);
    let y = LinearScale::new(y_lo, y_hi, Y1, Y0);

    let mut svg = Svg::new(W, H);
    svg.text(
        (X0 + X1) / 2.0,
        20.0,
        "middle",
        13.0,
        "#1a1a1a",
        &format!("{} — {}", kind.label(), family_label(family)),
    );

    // Horizontal gridlines and y ticks.
    for i in 0..=4 {
        let v = y_lo + (y_hi - y_lo) * i as f64 / 4.0;
        let py = y.map(v);
        svg.line(X0, py, X1, py, "stroke=\"#e4e4e4\" stroke-width=\"1\"");
        svg.text(X0 - 8.0, py + 3.5, "end", 10.0, "#444444", &coord(v));
    }
    // Integer x ticks, thinned to at most eleven.
    let span = (x_hi - x_lo).max(1.0);
    let step = (span / 10.0).ceil() as i64;
    let mut tick = x_lo.ceil() as i64;
    while tick as f64 <= x_hi {
        let px = x.map(tick as f64);
        svg.line(px, Y1, px, Y1 + 4.0, "stroke=\"#444444\" stroke-width=\"1\"");
        svg.text(px, Y1 + 16.0, "middle", 10.0, "#444444", &tick.to_string());
        tick += step;
    }
    svg.line(X0, Y1, X1, Y1, "stroke=\"#444444\" stroke-width=\"1\"");
    svg.line(X0, Y0, X0, Y1, "stroke=\"#444444\" stroke-width=\"1\"");
    svg.text(
        (X0 + X1) / 2.0,
        H - 12.0,
        "middle",
        11.0,
        "#1a1a1a",
        precision_axis_label(family),
    );
    svg.vtext(16.0, (Y0 + Y1) / 2.0, "middle", 11.0, "#1a1a1a", kind.label());

    for (i, sweep) in sweeps.iter().enumerate() {
        let color = SERIES_PALETTE[i % SERIES_PALETTE.len()];
        let pts: Vec<(f64, f64, f64)> = sweep
            .points
            .iter()
            .map(|p| {
                let r = p.triple.get(kind);
                (p.level as f64, r.mean, r.std)
            })
            .collect();
        let mut band: Vec<(f64, f64)> = pts
            .iter()
            .map(|(l, m, s)| (x.map(*l), y.map(m + s)))
            .collect();
        band.extend(pts.iter().rev().map(|(l, m, s)| (x.map(*l), y.map(m - s))));
        svg.polygon(
            &band,
            &format!("fill=\"{color}\" fill-opacity=\"0.18\" stroke=\"none\""),
        );
        let line: Vec<(f64, f64)> = pts.iter().map(|(l, m, _)| (x.map(*l), y.map(*m))).collect();
        svg.polyline(
            &line,
            &format!("fill=\"none\" stroke=\"{color}\" stroke-width=\"2\""),
        );
        for (px, py) in &line {
            svg.circle(*px, *py, 3.0, &format!("fill=\"{color}\""));
        }

        let ly = 48.0 + 18.0 * i as f64;
        svg.line(742.0, ly - 4.0, 766.0, ly - 4.0, &format!("stroke=\"{color}\" stroke-width=\"2\""));
        svg.text(772.0, ly, "start", 10.0, "#1a1a1a", &sweep.manifest.model);
    }
    svg.text(
        742.0,
        48.0 + 18.0 * sweeps.len() as f64 + 6.0,
        "start",
        9.0,
        "#666666",
        "line: fold mean, band: ±1 std",
    );
    Ok(svg.finish())
}

/// Scatter of the two leading components, colored by the underlying value.
///
/// Component signs are fixed so each score correlates non-negatively with
/// the value, making plots comparable across models and runs. Points whose
/// value is exactly zero are drawn as a cross.
pub fn pca_scatter_svg(
    matrix: &EmbeddingMatrix,
    values: &[f64],
    title: &str,
) -> Result<String, ReportError> {
    if matrix.len() != values.len() {
        return Err(ReportError::Metrics(MetricsError::ShapeMismatch {
            rows: matrix.len(),
            values: values.len(),
        }));
    }
    let m = matrix.to_dmatrix();
    let pca = pca_fit(&m, 2)?;
    let raw = pca_transform(&pca, &m)?;
    let mut scores = raw;
    for j in 0..2 {
        let col: Vec<f64> = scores.column(j).iter().copied().collect();
        let flip = match pearson(&col, values) {
            Ok(r) => r < 0.0,
            Err(NumericsError::ZeroVariance { .. }) => false,
            Err(e) => return Err(e.into()),
        };
        if flip {
            for i in 0..scores.nrows() {
                scores[(i, j)] = -scores[(i, j)];
            }
        }
    }

    const W: f64 = 400.0;
    const H: f64 = 400.0;
    const X0: f64 = 52.0;
    const X1: f64 = 382.0;
    const Y0: f64 = 36.0;
    const Y1: f64 = 350.0;

    let col_bounds = |j: usize| {
        let lo = scores.column(j).iter().copied().fold(f64::INFINITY, f64::min);
        let hi = scores
            .column(j)
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        padded(lo, hi, 0.05)
    };
    let (x_lo, x_hi) = col_bounds(0);
    let (y_lo, y_hi) = col_bounds(1);
    let x = LinearScale::new(x_lo, x_hi, X0, X1);
    let y = LinearScale::new(y_lo, y_hi, Y1, Y0);

    let v_lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let v_hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut svg = Svg::new(W, H);
    svg.text((X0 + X1) / 2.0, 22.0, "middle", 12.0, "#1a1a1a", title);
    svg.rect(
        X0,
        Y0,
        X1 - X0,
        Y1 - Y0,
        "fill=\"none\" stroke=\"#999999\" stroke-width=\"1\"",
    );
    for i in 0..values.len() {
        let px = x.map(scores[(i, 0)]);
        let py = y.map(scores[(i, 1)]);
        if values[i] == 0.0 {
            svg.text(px, py + 3.2, "middle", 9.0, "#1a1a1a", "×");
        } else {
            let t = if v_hi == v_lo {
                0.5
            } else {
                (values[i] - v_lo) / (v_hi - v_lo)
            };
            svg.circle(px, py, 2.5, &format!("fill=\"{}\"", colormap(t)));
        }
    }
    svg.text(
        (X0 + X1) / 2.0,
        H - 26.0,
        "middle",
        11.0,
        "#1a1a1a",
        &format!("PC1 ({:.1}%)", pca.variance_ratios[0] * 100.0),
    );
    svg.vtext(
        18.0,
        (Y0 + Y1) / 2.0,
        "middle",
        11.0,
        "#1a1a1a",
        &format!("PC2 ({:.1}%)", pca.variance_ratios[1] * 100.0),
    );
    svg.text(
        (X0 + X1) / 2.0,
        H - 8.0,
        "middle",
        9.0,
        "#666666",
        "color: value from low (dark) to high (bright); × marks zero",
    );
    Ok(svg.finish())
}

/// A figure plus the file stem it should be saved under.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedFigure {
    pub stem: String,
    pub title: String,
    pub svg: String,
}

/// Component scatters over integer magnitude ranges: `0..=bound` and
/// `-bound..=bound`, sampled uniformly.
pub fn magnitude_scatter_figures(
    embedder: &dyn Embedder,
    cache: Option<&CacheStore>,
    bound: i128,
    seed: u64,
) -> Result<Vec<NamedFigure>, ReportError> {
    let model = embedder.model().canonical();
    let ranges: [(i128, i128, usize, &str); 2] = [
        (0, bound, 1000, "magnitude-nonneg"),
        (-bound, bound, 2000, "magnitude-signed"),
    ];
    let mut figures = Vec::with_capacity(ranges.len());
    for (lo, hi, n, stem) in ranges {
        let samples = gen_integer_range(
            lo,
            hi,
            n,
            derive_seed(seed, &format!("magnitude|{lo}|{hi}|{n}")),
        )?;
        let texts: Vec<String> = samples.iter().map(|s| s.text.clone()).collect();
        let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
        let rows = match cache {
            Some(store) => cached_embed(store, embedder, &texts)?,
            None => embedder.embed_texts(&texts)?,
        };
        let matrix = EmbeddingMatrix::from_rows(rows)?;
        let title = format!("{model} — integers {lo}..{hi}");
        let svg = pca_scatter_svg(&matrix, &values, &title)?;
        figures.push(NamedFigure {
            stem: stem.to_string(),
            title,
            svg,
        });
    }
    Ok(figures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{run_sweep, SweepOptions};
    use crate::numgen::gen_mixed_sign_integers;
    use crate::providers::ModelRef;
    use crate::providers::SyntheticEmbedder;

    fn embedder(spec: &str) -> SyntheticEmbedder {
        SyntheticEmbedder::new(&ModelRef::parse(spec).unwrap()).unwrap()
    }

    fn sweep(spec: &str, seed: u64) -> SweepResult {
        run_sweep(
            Family::PositiveDecimals,
            &[1, 2, 3],
            &embedder(spec),
            None,
            &SweepOptions {
                n: 40,
                k: 3,
                seed,
                ..SweepOptions::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn curve_draws_every_series_with_legend() {
        let sweeps = vec![
            sweep("synthetic:linear/d=8/sigma=0.1", 1),
            sweep("synthetic:isotropic/d=8", 1),
        ];
        let out = metric_curve_svg(MetricKind::LinearR2, &sweeps).unwrap();
        assert!(out.starts_with("<svg"));
        assert_eq!(out.matches("<polyline").count(), 2);
        assert_eq!(out.matches("<polygon").count(), 2);
        assert!(out.contains("synthetic:linear/d=8/seed=0/sigma=0.1"));
        assert!(out.contains("synthetic:isotropic/d=8/seed=0"));
        assert!(out.contains("Linear R²"));
        assert!(out.contains("decimal places (b)"));
        assert!(out.contains("±1 std"));
    }

    #[test]
    fn curve_is_byte_stable_and_input_sensitive() {
        let sweeps = vec![sweep("synthetic:linear/d=8/sigma=0.1", 1)];
        let a = metric_curve_svg(MetricKind::PcaR2, &sweeps).unwrap();
        let b = metric_curve_svg(MetricKind::PcaR2, &sweeps).unwrap();
        assert_eq!(a, b);
        let other = vec![sweep("synthetic:linear/d=8/sigma=0.1", 2)];
        assert_ne!(a, metric_curve_svg(MetricKind::PcaR2, &other).unwrap());
    }

    #[test]
    fn curve_rejects_bad_combinations() {
        assert!(matches!(
            metric_curve_svg(MetricKind::LinearR2, &[]),
            Err(ReportError::EmptyInput)
        ));
        let a = sweep("synthetic:linear/d=8/sigma=0.1", 1);
        let mut b = sweep("synthetic:isotropic/d=8", 1);
        b.manifest.family = Family::MixedSignIntegers;
        assert!(matches!(
            metric_curve_svg(MetricKind::LinearR2, &[a.clone(), b]),
            Err(ReportError::MixedFamilies { .. })
        ));
        assert!(matches!(
            metric_curve_svg(MetricKind::LinearR2, &[a.clone(), a.clone()]),
            Err(ReportError::DuplicateModel { .. })
        ));
    }

    #[test]
    fn scatter_marks_zero_and_labels_component_shares() {
        let ds = gen_mixed_sign_integers(2, 199, 3).unwrap();
        let e = embedder("synthetic:linear/d=4/sigma=0.05");
        let rows = e.embed_texts(&ds.texts()).unwrap();
        let m = EmbeddingMatrix::from_rows(rows).unwrap();
        let out = pca_scatter_svg(&m, &ds.values(), "demo").unwrap();
        assert!(out.contains(">×</text>"));
        assert!(out.contains("PC1 ("));
        assert!(out.contains("PC2 ("));
        assert!(out.contains("demo"));
        // 199 samples: 198 circles plus one cross.
        assert_eq!(out.matches("<circle").count(), 198);
    }

    #[test]
    fn scatter_is_invariant_to_embedding_sign() {
        let ds = gen_mixed_sign_integers(2, 150, 5).unwrap();
        let e = embedder("synthetic:linear/d=4/sigma=0.1");
        let rows = e.embed_texts(&ds.texts()).unwrap();
        let flipped: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|v| -v).collect())
            .collect();
        let a = pca_scatter_svg(
            &EmbeddingMatrix::from_rows(rows).unwrap(),
            &ds.values(),
            "t",
        )
        .unwrap();
        let b = pca_scatter_svg(
            &EmbeddingMatrix::from_rows(flipped).unwrap(),
            &ds.values(),
            "t",
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scatter_rejects_shape_mismatch() {
        let ds = gen_mixed_sign_integers(2, 50, 5).unwrap();
        let e = embedder("synthetic:linear/d=4");
        let m = EmbeddingMatrix::from_rows(e.embed_texts(&ds.texts()).unwrap()).unwrap();
        assert!(pca_scatter_svg(&m, &ds.values()[..10], "t").is_err());
    }

    #[test]
    fn magnitude_figures_cover_both_ranges_deterministically() {
        let e = embedder("synthetic:linear/d=4/sigma=0.1");
        let a = magnitude_scatter_figures(&e, None, 50, 9).unwrap();
        let b = magnitude_scatter_figures(&e, None, 50, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].stem, "magnitude-nonneg");
        assert_eq!(a[1].stem, "magnitude-signed");
        assert!(a[0].title.contains("integers 0..50"));
        assert!(a[1].title.contains("integers -50..50"));
        // Both ranges include zero, drawn as a cross; the rest are circles.
        assert!(a[0].svg.contains(">×</text>"));
        assert!(a[1].svg.contains(">×</text>"));
        assert_eq!(a[0].svg.matches("<circle").count(), 50);
        assert_eq!(a[1].svg.matches("<circle").count(), 100);
    }
}
