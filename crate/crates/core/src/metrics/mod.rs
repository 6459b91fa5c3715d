//! The three value-structure metrics and their cross-validated evaluation.
//!
//! For an embedding matrix `E` (one row per number) and the numbers `x`:
//!
//! * **linear reconstruction R²** — fit `x ≈ E·w + c` by minimum-norm least
//!   squares on the training folds, score R² on the held-out fold;
//! * **first-component R²** — fit a one-component PCA on the training folds,
//!   fit `x ≈ α·score + β` on training scores, score R² on held-out scores;
//! * **first-component variance ratio** — share of total variance captured
//!   by the leading principal component of the training folds.
//!
//! Every metric is reported as mean ± population standard deviation over the
//! folds. Folds whose targets have no variance cannot be scored; they are
//! dropped with a warning and the survivors carry the estimate.

mod sweep;

pub use sweep::{
    min_max_summary, read_sweep, run_sweep, sweep_to_string, write_sweep, MetricSummary,
    SummaryStat, SweepManifest, SweepOptions, SweepPoint, SweepResult, SweepSummary,
    SWEEP_FORMAT_VERSION,
};

use crate::numerics::{
    self, center_columns, fit_from_centered_svd, pca_from_centered_svd, pca_transform, r2_score,
    thin_svd, FitOptions, NumericsError, PcaModel, DEFAULT_RCOND,
};
use crate::numgen::{FoldAssignment, NumgenError};
use crate::providers::{EmbeddingMatrix, ProviderError};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("embeddings and values disagree: {rows} rows vs {values} values")]
    ShapeMismatch { rows: usize, values: usize },
    #[error("fold assignment covers {folds} rows but there are {rows}")]
    FoldMismatch { folds: usize, rows: usize },
    #[error("every fold was degenerate; nothing to score")]
    AllFoldsDegenerate,
    #[error("no precision levels requested")]
    EmptyLevels,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Numgen(#[from] NumgenError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

/// Which of the three metrics a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    LinearR2,
    PcaR2,
    PcaVarianceRatio,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [
        MetricKind::LinearR2,
        MetricKind::PcaR2,
        MetricKind::PcaVarianceRatio,
    ];

    /// Stable kebab-case name used in files.
    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::LinearR2 => "linear-r2",
            MetricKind::PcaR2 => "pca-r2",
            MetricKind::PcaVarianceRatio => "pca-variance-ratio",
        }
    }

    /// Human-facing label used in tables and figures.
    pub fn label(&self) -> &'static str {
        match self {
            MetricKind::LinearR2 => "Linear R²",
            MetricKind::PcaR2 => "PCA R²",
            MetricKind::PcaVarianceRatio => "PCA Variance",
        }
    }

    pub fn parse(s: &str) -> Option<MetricKind> {
        MetricKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// One metric's cross-validated estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricResult {
    pub kind: MetricKind,
    /// Mean over retained folds.
    pub mean: f64,
    /// Population standard deviation over retained folds.
    pub std: f64,
    /// Per-fold values, parallel to `fold_ids`.
    pub fold_values: Vec<f64>,
    /// Folds that contributed (degenerate folds are absent).
    pub fold_ids: Vec<usize>,
}

impl MetricResult {
    /// Aggregate per-fold values; `fold_ids` and `fold_values` must be
    /// parallel and non-empty.
    pub fn from_folds(
        kind: MetricKind,
        fold_ids: Vec<usize>,
        fold_values: Vec<f64>,
    ) -> Result<Self, MetricsError> {
        assert_eq!(fold_ids.len(), fold_values.len(), "parallel fold arrays");
        if fold_values.is_empty() {
            return Err(MetricsError::AllFoldsDegenerate);
        }
        let n = fold_values.len() as f64;
        let mean = fold_values.iter().sum::<f64>() / n;
        let var = fold_values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Ok(Self {
            kind,
            mean,
            std: var.sqrt(),
            fold_values,
            fold_ids,
        })
    }
}

/// The three metrics for one (model, family, precision) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTriple {
    pub linear_r2: MetricResult,
    pub pca_r2: MetricResult,
    pub pca_vr: MetricResult,
}

impl MetricTriple {
    pub fn get(&self, kind: MetricKind) -> &MetricResult {
        match kind {
            MetricKind::LinearR2 => &self.linear_r2,
            MetricKind::PcaR2 => &self.pca_r2,
            MetricKind::PcaVarianceRatio => &self.pca_vr,
        }
    }
}

/// Evaluation settings shared by all metrics.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Singular-value cutoff for the linear fit.
    pub rcond: f64,
    /// Optional ridge penalty for the linear fit.
    pub ridge: Option<f64>,
    /// L2-normalize each embedding row before evaluation.
    pub normalize: bool,
    /// Fit the PCA on the full matrix instead of per-fold training data.
    /// Held-out scoring of the component fit still respects the folds.
    pub global_pca: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            rcond: DEFAULT_RCOND,
            ridge: None,
            normalize: false,
            global_pca: false,
        }
    }
}

fn has_variance(values: &[f64]) -> bool {
    values.iter().any(|v| *v != values[0])
}

fn normalized_rows(e: &EmbeddingMatrix) -> DMatrix<f64> {
    let mut m = e.to_dmatrix();
    for i in 0..m.nrows() {
        let norm = m.row(i).norm();
        if norm > 0.0 {
            for j in 0..m.ncols() {
                m[(i, j)] /= norm;
            }
        }
    }
    m
}

fn select(m: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

/// Ordinary least squares of `y ≈ a·s + b` for scalar scores.
fn univariate_fit(scores: &[f64], y: &[f64]) -> Result<(f64, f64), NumericsError> {
    let n = scores.len() as f64;
    let ms = scores.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut var_s = 0.0;
    let mut cov = 0.0;
    for (s, t) in scores.iter().zip(y) {
        var_s += (s - ms) * (s - ms);
        cov += (s - ms) * (t - my);
    }
    if var_s == 0.0 {
        return Err(NumericsError::ZeroVariance {
            what: "component scores",
        });
    }
    let slope = cov / var_s;
    Ok((slope, my - slope * ms))
}

fn first_scores(pca: &PcaModel, m: &DMatrix<f64>) -> Result<Vec<f64>, NumericsError> {
    let scores = pca_transform(pca, m)?;
    Ok(scores.column(0).iter().copied().collect())
}

/// Cross-validated evaluation of all three metrics.
///
/// One SVD per fold serves both the linear fit and the PCA. Folds whose
/// held-out or training targets are constant are dropped with a warning;
/// if every fold is degenerate the evaluation fails.
pub fn eval_triple(
    e: &EmbeddingMatrix,
    x: &[f64],
    folds: &FoldAssignment,
    opts: &EvalOptions,
) -> Result<MetricTriple, MetricsError> {
    if e.len() != x.len() {
        return Err(MetricsError::ShapeMismatch {
            rows: e.len(),
            values: x.len(),
        });
    }
    if folds.len() != e.len() {
        return Err(MetricsError::FoldMismatch {
            folds: folds.len(),
            rows: e.len(),
        });
    }
    let m = if opts.normalize {
        normalized_rows(e)
    } else {
        e.to_dmatrix()
    };
    let fit_opts = FitOptions {
        rcond: opts.rcond,
        ridge: opts.ridge,
    };

    let global_pca = if opts.global_pca {
        Some(numerics::pca_fit(&m, 1)?)
    } else {
        None
    };

    let mut linear_ids = Vec::new();
    let mut linear_vals = Vec::new();
    let mut pca_ids = Vec::new();
    let mut pca_vals = Vec::new();
    let mut vr_ids = Vec::new();
    let mut vr_vals = Vec::new();

    for fold in 0..folds.k() {
        let train_idx = folds.train_indices(fold);
        let test_idx = folds.test_indices(fold);
        if train_idx.is_empty() || test_idx.is_empty() {
            log::warn!("fold {fold}: empty split, dropping");
            continue;
        }
        let x_train: Vec<f64> = train_idx.iter().map(|&i| x[i]).collect();
        let x_test: Vec<f64> = test_idx.iter().map(|&i| x[i]).collect();
        if !has_variance(&x_train) || !has_variance(&x_test) {
            log::warn!("fold {fold}: constant targets, dropping");
            continue;
        }
        let e_train = select(&m, &train_idx);
        let e_test = select(&m, &test_idx);

        let (centered, means) = center_columns(&e_train);
        let factors = thin_svd(&centered)?;

        // Held-out linear reconstruction.
        let model = fit_from_centered_svd(&factors, &means, &x_train, &fit_opts)?;
        let pred = model.predict(&e_test)?;
        linear_ids.push(fold);
        linear_vals.push(r2_score(&x_test, &pred)?);

        // First component: shared between the held-out univariate fit and
        // the variance ratio.
        let fold_pca;
        let pca = match &global_pca {
            Some(g) => g,
            None => {
                fold_pca = pca_from_centered_svd(&factors, &means, 1)?;
                &fold_pca
            }
        };
        vr_ids.push(fold);
        vr_vals.push(pca.variance_ratios[0]);

        let train_scores = first_scores(pca, &e_train)?;
        match univariate_fit(&train_scores, &x_train) {
            Ok((slope, intercept)) => {
                let test_scores = first_scores(pca, &e_test)?;
                let pred: Vec<f64> = test_scores.iter().map(|s| slope * s + intercept).collect();
                pca_ids.push(fold);
                pca_vals.push(r2_score(&x_test, &pred)?);
            }
            Err(NumericsError::ZeroVariance { .. }) => {
                log::warn!("fold {fold}: constant component scores, dropping from component fit");
            }
            Err(e) => return Err(e.into()),
        }
    }

    Ok(MetricTriple {
        linear_r2: MetricResult::from_folds(MetricKind::LinearR2, linear_ids, linear_vals)?,
        pca_r2: MetricResult::from_folds(MetricKind::PcaR2, pca_ids, pca_vals)?,
        pca_vr: MetricResult::from_folds(MetricKind::PcaVarianceRatio, vr_ids, vr_vals)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numgen::{gen_mixed_sign_decimals, gen_mixed_sign_integers, kfold_split};
    use crate::providers::{Embedder, ModelRef, SyntheticEmbedder};
    use approx::assert_relative_eq;

    fn embed_dataset(spec: &str, ds: &crate::numgen::ScalarDataset) -> EmbeddingMatrix {
        let model = ModelRef::parse(spec).unwrap();
        let e = SyntheticEmbedder::new(&model).unwrap();
        EmbeddingMatrix::from_rows(e.embed_texts(&ds.texts()).unwrap()).unwrap()
    }

    #[test]
    fn noiseless_linear_embedding_scores_perfectly() {
        let ds = gen_mixed_sign_decimals(3, 300, 5).unwrap();
        let m = embed_dataset("synthetic:linear/d=24", &ds);
        let folds = kfold_split(ds.size(), 5, 77).unwrap();
        let t = eval_triple(&m, &ds.values(), &folds, &EvalOptions::default()).unwrap();
        for v in &t.linear_r2.fold_values {
            assert_relative_eq!(*v, 1.0, epsilon = 1e-9);
        }
        for v in &t.pca_r2.fold_values {
            assert_relative_eq!(*v, 1.0, epsilon = 1e-9);
        }
        for v in &t.pca_vr.fold_values {
            assert_relative_eq!(*v, 1.0, epsilon = 1e-12);
        }
        assert_eq!(t.linear_r2.fold_ids, vec![0, 1, 2, 3, 4]);
        assert!(t.linear_r2.std < 1e-9);
    }

    #[test]
    fn fold_metrics_match_independent_reference() {
        let ds = gen_mixed_sign_decimals(3, 120, 9).unwrap();
        let m = embed_dataset("synthetic:linear/d=16/sigma=0.1", &ds);
        let folds = kfold_split(ds.size(), 4, 13).unwrap();
        let t = eval_triple(&m, &ds.values(), &folds, &EvalOptions::default()).unwrap();

        let rows: Vec<Vec<f64>> = m.rows().to_vec();
        let fold_of: Vec<usize> = (0..ds.size()).map(|i| folds.fold_of(i)).collect();
        let reference = numprobe_testkit::reference::fold_metrics_ref(
            &rows,
            &ds.values(),
            &fold_of,
            4,
            crate::numerics::DEFAULT_RCOND,
        );
        for (ours, theirs) in t.linear_r2.fold_values.iter().zip(&reference.linear_r2) {
            assert_relative_eq!(ours, theirs, epsilon = 1e-8, max_relative = 1e-8);
        }
        for (ours, theirs) in t.pca_r2.fold_values.iter().zip(&reference.pca_r2) {
            assert_relative_eq!(ours, theirs, epsilon = 1e-8, max_relative = 1e-8);
        }
        for (ours, theirs) in t.pca_vr.fold_values.iter().zip(&reference.pca_vr) {
            assert_relative_eq!(ours, theirs, epsilon = 1e-10);
        }
    }

    #[test]
    fn rotation_and_scaling_leave_metrics_unchanged() {
        let ds = gen_mixed_sign_decimals(2, 150, 21).unwrap();
        let m = embed_dataset("synthetic:linear/d=12/sigma=0.05", &ds);
        let folds = kfold_split(ds.size(), 5, 3).unwrap();
        let base = eval_triple(&m, &ds.values(), &folds, &EvalOptions::default()).unwrap();

        let q = crate::numerics::random_orthogonal(12, 8).unwrap();
        let rotated_scaled = {
            let d = m.to_dmatrix() * q * 3.7;
            let rows: Vec<Vec<f64>> = (0..d.nrows())
                .map(|i| (0..d.ncols()).map(|j| d[(i, j)]).collect())
                .collect();
            EmbeddingMatrix::from_rows(rows).unwrap()
        };
        let t = eval_triple(&rotated_scaled, &ds.values(), &folds, &EvalOptions::default())
            .unwrap();
        for (a, b) in base
            .linear_r2
            .fold_values
            .iter()
            .zip(&t.linear_r2.fold_values)
        {
            assert_relative_eq!(a, b, epsilon = 1e-8);
        }
        for (a, b) in base.pca_r2.fold_values.iter().zip(&t.pca_r2.fold_values) {
            assert_relative_eq!(a, b, epsilon = 1e-8);
        }
        for (a, b) in base.pca_vr.fold_values.iter().zip(&t.pca_vr.fold_values) {
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn sign_dominated_embedding_caps_component_fit() {
        // The leading component of this construction carries the sign, so a
        // straight line through its scores explains sign variance but not
        // the value itself; the full linear read-out still recovers the
        // value exactly.
        let ds = gen_mixed_sign_integers(3, 500, 11).unwrap();
        let m = embed_dataset("synthetic:sign-split/d=8", &ds);
        let folds = kfold_split(ds.size(), 5, 19).unwrap();
        let t = eval_triple(&m, &ds.values(), &folds, &EvalOptions::default()).unwrap();
        assert!(t.linear_r2.mean > 0.999, "{}", t.linear_r2.mean);
        assert!(
            t.pca_r2.mean > 0.5 && t.pca_r2.mean < 0.9,
            "sign carries ~3/4 of uniform-integer variance, got {}",
            t.pca_r2.mean
        );
        assert!(t.pca_vr.mean > 0.9, "{}", t.pca_vr.mean);
    }

    #[test]
    fn structureless_embedding_scores_near_zero() {
        let ds = gen_mixed_sign_decimals(3, 200, 31).unwrap();
        let m = embed_dataset("synthetic:isotropic/d=8", &ds);
        let folds = kfold_split(ds.size(), 5, 23).unwrap();
        let t = eval_triple(&m, &ds.values(), &folds, &EvalOptions::default()).unwrap();
        assert!(t.linear_r2.mean < 0.2, "{}", t.linear_r2.mean);
        assert!(t.pca_r2.mean < 0.2, "{}", t.pca_r2.mean);
        assert!(t.pca_vr.mean < 0.35, "{}", t.pca_vr.mean);
    }

    #[test]
    fn global_component_fit_still_scores_held_out() {
        let ds = gen_mixed_sign_decimals(2, 150, 41).unwrap();
        let m = embed_dataset("synthetic:linear/d=10/sigma=0.2", &ds);
        let folds = kfold_split(ds.size(), 5, 7).unwrap();
        let local = eval_triple(&m, &ds.values(), &folds, &EvalOptions::default()).unwrap();
        let global = eval_triple(
            &m,
            &ds.values(),
            &folds,
            &EvalOptions {
                global_pca: true,
                ..EvalOptions::default()
            },
        )
        .unwrap();
        // One shared component: the variance ratio is constant across folds.
        assert!(global.pca_vr.std < 1e-15);
        assert!(local.pca_vr.std > 0.0);
        // Estimates stay in the same regime.
        assert!((global.pca_r2.mean - local.pca_r2.mean).abs() < 0.1);
    }

    #[test]
    fn normalize_flag_equals_external_row_normalization() {
        let ds = gen_mixed_sign_decimals(2, 100, 51).unwrap();
        let m = embed_dataset("synthetic:linear/d=6/sigma=0.3", &ds);
        let folds = kfold_split(ds.size(), 5, 9).unwrap();
        let plain = eval_triple(&m, &ds.values(), &folds, &EvalOptions::default()).unwrap();
        let flagged = eval_triple(
            &m,
            &ds.values(),
            &folds,
            &EvalOptions {
                normalize: true,
                ..EvalOptions::default()
            },
        )
        .unwrap();
        let pre_normalized = {
            let rows: Vec<Vec<f64>> = m
                .rows()
                .iter()
                .map(|r| {
                    let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
                    r.iter().map(|v| v / norm).collect()
                })
                .collect();
            EmbeddingMatrix::from_rows(rows).unwrap()
        };
        let external =
            eval_triple(&pre_normalized, &ds.values(), &folds, &EvalOptions::default()).unwrap();
        assert_eq!(flagged, external);
        assert_ne!(flagged, plain);
    }

    #[test]
    fn ridge_option_flows_into_the_linear_fit() {
        let ds = gen_mixed_sign_decimals(2, 80, 61).unwrap();
        let m = embed_dataset("synthetic:linear/d=6", &ds);
        let folds = kfold_split(ds.size(), 4, 11).unwrap();
        let plain = eval_triple(&m, &ds.values(), &folds, &EvalOptions::default()).unwrap();
        let heavy = eval_triple(
            &m,
            &ds.values(),
            &folds,
            &EvalOptions {
                ridge: Some(1e3),
                ..EvalOptions::default()
            },
        )
        .unwrap();
        assert!(plain.linear_r2.mean > 1.0 - 1e-9);
        assert!(heavy.linear_r2.mean < plain.linear_r2.mean - 1e-3);
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let ds = gen_mixed_sign_decimals(1, 21, 1).unwrap();
        let m = embed_dataset("synthetic:linear/d=4", &ds);
        let folds = kfold_split(ds.size(), 3, 1).unwrap();
        let short = &ds.values()[..10];
        assert!(matches!(
            eval_triple(&m, short, &folds, &EvalOptions::default()),
            Err(MetricsError::ShapeMismatch { .. })
        ));
        let wrong_folds = kfold_split(10, 2, 1).unwrap();
        assert!(matches!(
            eval_triple(&m, &ds.values(), &wrong_folds, &EvalOptions::default()),
            Err(MetricsError::FoldMismatch { .. })
        ));
    }

    #[test]
    fn metric_result_aggregates_mean_and_population_std() {
        let r = MetricResult::from_folds(
            MetricKind::LinearR2,
            vec![0, 1, 2, 3],
            vec![1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        assert_relative_eq!(r.mean, 2.5, epsilon = 1e-15);
        // Population std of {1,2,3,4}: sqrt(1.25)
        assert_relative_eq!(r.std, 1.25f64.sqrt(), epsilon = 1e-15);
        assert!(MetricResult::from_folds(MetricKind::LinearR2, vec![], vec![]).is_err());
    }

    #[test]
    fn metric_kind_names_round_trip() {
        for kind in MetricKind::ALL {
            assert_eq!(MetricKind::parse(kind.name()), Some(kind));
        }
        assert_eq!(MetricKind::parse("nope"), None);
    }

    #[test]
    fn evaluation_is_deterministic() {
        let ds = gen_mixed_sign_decimals(3, 100, 71).unwrap();
        let m = embed_dataset("synthetic:linear/d=8/sigma=0.1", &ds);
        let folds = kfold_split(ds.size(), 5, 2).unwrap();
        let a = eval_triple(&m, &ds.values(), &folds, &EvalOptions::default()).unwrap();
        let b = eval_triple(&m, &ds.values(), &folds, &EvalOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
