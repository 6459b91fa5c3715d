//! Linear-algebra core: thin SVD, minimum-norm least squares, PCA, and the
//! scalar statistics the metrics are built from.
//!
//! All routines take rows-as-samples matrices. Least squares and PCA both
//! center columns internally, so callers never pre-center. Backed by
//! `nalgebra`; the test suite checks every routine against independent
//! reference implementations.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

/// Relative singular-value cutoff used when none is specified.
pub const DEFAULT_RCOND: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("empty input")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("singular value decomposition did not converge")]
    NoConvergence,
    #[error("{what} has zero variance")]
    ZeroVariance { what: &'static str },
    #[error("component count {k} out of range (max {max})")]
    InvalidComponentCount { k: usize, max: usize },
    #[error("matrix rows have inconsistent lengths: row {row} has {got}, expected {expected}")]
    RaggedRows {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
}

/// Build a rows-as-samples matrix from row vectors, rejecting empty, ragged,
/// or non-finite input.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, NumericsError> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(NumericsError::EmptyInput);
    }
    let d = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(NumericsError::RaggedRows {
                row: i,
                got: row.len(),
                expected: d,
            });
        }
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(NumericsError::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]))
}

/// Subtract each column's mean; returns the centered matrix and the means.
pub fn center_columns(a: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let n = a.nrows();
    let means = DVector::from_fn(a.ncols(), |j, _| a.column(j).sum() / n as f64);
    let mut centered = a.clone();
    for j in 0..a.ncols() {
        let m = means[j];
        for i in 0..n {
            centered[(i, j)] -= m;
        }
    }
    (centered, means)
}

/// Thin singular value decomposition `M = U diag(s) Vᵀ` with singular values
/// sorted descending.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// n × r, orthonormal columns.
    pub u: DMatrix<f64>,
    /// r singular values, descending.
    pub s: DVector<f64>,
    /// d × r, orthonormal columns.
    pub v: DMatrix<f64>,
}

/// Largest `‖a − U·diag(s)·Vᵀ‖ / ‖a‖` (Frobenius) a factorization may leave
/// behind before it is rejected. Correct results sit near machine epsilon;
/// the misconvergences this guards against land many orders of magnitude
/// higher, so the gap is unambiguous.
const SVD_RESIDUAL_TOL: f64 = 1e-10;

/// Thin SVD of `a`, with every factorization verified by reconstruction.
///
/// The QR-iteration backend can silently return a wrong leading singular
/// value on some inputs (wide shapes and rank-deficient columns are the
/// usual triggers), so the result is only trusted if `U·diag(s)·Vᵀ`
/// actually reproduces `a`. On rejection the decomposition is retried on
/// the transpose, and as a last resort recomputed with a one-sided Jacobi
/// iteration, which is slower but does not misconverge. A factorization
/// that still fails verification surfaces as
/// [`NumericsError::NoConvergence`] instead of poisoning downstream
/// statistics.
pub fn thin_svd(a: &DMatrix<f64>) -> Result<SvdFactors, NumericsError> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(NumericsError::EmptyInput);
    }
    if let Some(f) = qr_svd(a) {
        if svd_residual(a, &f) <= SVD_RESIDUAL_TOL {
            return Ok(f);
        }
    }
    let transposed = a.transpose();
    if let Some(f) = qr_svd(&transposed) {
        let swapped = SvdFactors {
            u: f.v,
            s: f.s,
            v: f.u,
        };
        if svd_residual(a, &swapped) <= SVD_RESIDUAL_TOL {
            return Ok(swapped);
        }
    }
    let f = if a.nrows() >= a.ncols() {
        one_sided_jacobi_svd(a)?
    } else {
        let f = one_sided_jacobi_svd(&transposed)?;
        SvdFactors {
            u: f.v,
            s: f.s,
            v: f.u,
        }
    };
    if svd_residual(a, &f) <= SVD_RESIDUAL_TOL {
        Ok(f)
    } else {
        Err(NumericsError::NoConvergence)
    }
}

/// One QR-iteration SVD attempt, unverified.
fn qr_svd(a: &DMatrix<f64>) -> Option<SvdFactors> {
    let max_niter = 200 * a.nrows().min(a.ncols()).max(10);
    let svd = a.clone().try_svd(true, true, f64::EPSILON, max_niter)?;
    Some(SvdFactors {
        u: svd.u?,
        s: svd.singular_values,
        v: svd.v_t?.transpose(),
    })
}

/// Relative Frobenius reconstruction error of a candidate factorization.
fn svd_residual(a: &DMatrix<f64>, f: &SvdFactors) -> f64 {
    let mut scaled_u = f.u.clone();
    for (j, s) in f.s.iter().enumerate() {
        scaled_u.column_mut(j).scale_mut(*s);
    }
    let rebuilt = scaled_u * f.v.transpose();
    (a - rebuilt).norm() / a.norm().max(f64::MIN_POSITIVE)
}

/// One-sided Jacobi SVD of a tall-or-square matrix (`nrows ≥ ncols`).
///
/// Plane rotations orthogonalize the columns in place; each column's final
/// norm is its singular value and the accumulated rotations form `V`. The
/// sweep count is capped so a non-converging input errors out rather than
/// spinning.
fn one_sided_jacobi_svd(a: &DMatrix<f64>) -> Result<SvdFactors, NumericsError> {
    let (n, d) = (a.nrows(), a.ncols());
    let mut w = a.clone();
    let mut v = DMatrix::<f64>::identity(d, d);
    let mut converged = false;
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..d {
            for q in (p + 1)..d {
                let (mut alpha, mut beta, mut gamma) = (0.0f64, 0.0f64, 0.0f64);
                for i in 0..n {
                    let (wip, wiq) = (w[(i, p)], w[(i, q)]);
                    alpha += wip * wip;
                    beta += wiq * wiq;
                    gamma += wip * wiq;
                }
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let (wip, wiq) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = c * wip - s * wiq;
                    w[(i, q)] = s * wip + c * wiq;
                }
                for i in 0..d {
                    let (vip, viq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(NumericsError::NoConvergence);
    }
    // Columns whose norm is below the backward-error floor carry only
    // rounding residue (often parallel to a real direction), so their
    // singular value is an exact zero and their U column is rebuilt below.
    let raw_norms: Vec<f64> = (0..d).map(|j| w.column(j).norm()).collect();
    let sigma_max = raw_norms.iter().cloned().fold(0.0f64, f64::max);
    let floor = sigma_max * n.max(d) as f64 * f64::EPSILON;
    let norms: Vec<f64> = raw_norms
        .into_iter()
        .map(|x| if x <= floor { 0.0 } else { x })
        .collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());
    let mut u = DMatrix::<f64>::zeros(n, d);
    let mut s = DVector::<f64>::zeros(d);
    let mut sorted_v = DMatrix::<f64>::zeros(d, d);
    for (new_j, &old_j) in order.iter().enumerate() {
        s[new_j] = norms[old_j];
        sorted_v.set_column(new_j, &v.column(old_j));
        if norms[old_j] > 0.0 {
            let mut col = w.column(old_j).clone_owned();
            col /= norms[old_j];
            u.set_column(new_j, &col);
        }
    }
    complete_zero_columns(&mut u, &s);
    Ok(SvdFactors { u, s, v: sorted_v })
}

/// Fill the columns of `u` whose singular value is exactly zero with unit
/// vectors orthogonal to every other column, keeping `u` orthonormal.
fn complete_zero_columns(u: &mut DMatrix<f64>, s: &DVector<f64>) {
    let (n, d) = (u.nrows(), u.ncols());
    for j in 0..d {
        if s[j] > 0.0 {
            continue;
        }
        for cand in 0..n {
            let mut col = vec![0.0; n];
            col[cand] = 1.0;
            for k in 0..d {
                if k == j {
                    continue;
                }
                let mut dot = 0.0;
                for (i, c) in col.iter().enumerate() {
                    dot += u[(i, k)] * c;
                }
                for (i, c) in col.iter_mut().enumerate() {
                    *c -= dot * u[(i, k)];
                }
            }
            let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
            // Some basis vector always keeps a component of at least
            // 1/sqrt(n) outside the span of the other columns.
            if norm > 1e-6 {
                for (i, c) in col.iter().enumerate() {
                    u[(i, j)] = c / norm;
                }
                break;
            }
        }
    }
}

/// Options for [`min_norm_fit`].
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Singular values below `rcond * s_max` are treated as zero.
    pub rcond: f64,
    /// Optional Tikhonov penalty; `None` gives the pseudoinverse solution.
    pub ridge: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            rcond: DEFAULT_RCOND,
            ridge: None,
        }
    }
}

/// Linear map `x ↦ a·weights + intercept`.
#[derive(Debug, Clone)]
pub struct LinearModel {
    pub weights: DVector<f64>,
    pub intercept: f64,
}

impl LinearModel {
    /// Predicted targets for each row of `a`.
    pub fn predict(&self, a: &DMatrix<f64>) -> Result<Vec<f64>, NumericsError> {
        if a.ncols() != self.weights.len() {
            return Err(NumericsError::DimensionMismatch {
                expected: self.weights.len(),
                got: a.ncols(),
            });
        }
        let y = a * &self.weights;
        Ok(y.iter().map(|v| v + self.intercept).collect())
    }
}

/// Least-squares fit of `y ≈ a·w + c` choosing, among all least-squares
/// solutions, the one with minimum `‖w‖` (the intercept is recovered from the
/// column means, not penalized). With `ridge = Some(λ)` the singular-value
/// filter becomes `s/(s² + λ)`.
pub fn min_norm_fit(
    a: &DMatrix<f64>,
    y: &[f64],
    opts: &FitOptions,
) -> Result<LinearModel, NumericsError> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(NumericsError::EmptyInput);
    }
    if y.len() != a.nrows() {
        return Err(NumericsError::DimensionMismatch {
            expected: a.nrows(),
            got: y.len(),
        });
    }
    let (centered, x_means) = center_columns(a);
    let f = thin_svd(&centered)?;
    fit_from_centered_svd(&f, &x_means, y, opts)
}

/// [`min_norm_fit`] continued from a precomputed SVD of the centered data
/// matrix, so one factorization can serve both regression and PCA.
pub fn fit_from_centered_svd(
    f: &SvdFactors,
    x_means: &DVector<f64>,
    y: &[f64],
    opts: &FitOptions,
) -> Result<LinearModel, NumericsError> {
    if y.is_empty() {
        return Err(NumericsError::EmptyInput);
    }
    if y.len() != f.u.nrows() {
        return Err(NumericsError::DimensionMismatch {
            expected: f.u.nrows(),
            got: y.len(),
        });
    }
    let y_mean = y.iter().sum::<f64>() / y.len() as f64;
    let y_centered = DVector::from_iterator(y.len(), y.iter().map(|v| v - y_mean));
    let s_max = f.s.max();
    let coeffs = f.u.transpose() * y_centered;
    let mut scaled = DVector::zeros(f.s.len());
    for i in 0..f.s.len() {
        let s = f.s[i];
        let factor = match opts.ridge {
            Some(lambda) => s / (s * s + lambda),
            None => {
                if s > opts.rcond * s_max && s > 0.0 {
                    1.0 / s
                } else {
                    0.0
                }
            }
        };
        scaled[i] = coeffs[i] * factor;
    }
    let weights = &f.v * scaled;
    let intercept = y_mean - x_means.dot(&weights);
    Ok(LinearModel { weights, intercept })
}

/// Pearson correlation between two equal-length slices.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, NumericsError> {
    if x.is_empty() {
        return Err(NumericsError::EmptyInput);
    }
    if x.len() != y.len() {
        return Err(NumericsError::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(NumericsError::ZeroVariance { what: "first input" });
    }
    if syy == 0.0 {
        return Err(NumericsError::ZeroVariance {
            what: "second input",
        });
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Coefficient of determination of `pred` against `truth`:
/// `1 − Σ(truth−pred)² / Σ(truth−mean)²`.
pub fn r2_score(truth: &[f64], pred: &[f64]) -> Result<f64, NumericsError> {
    if truth.is_empty() {
        return Err(NumericsError::EmptyInput);
    }
    if truth.len() != pred.len() {
        return Err(NumericsError::DimensionMismatch {
            expected: truth.len(),
            got: pred.len(),
        });
    }
    let mean = truth.iter().sum::<f64>() / truth.len() as f64;
    let ss_tot: f64 = truth.iter().map(|t| (t - mean) * (t - mean)).sum();
    if ss_tot == 0.0 {
        return Err(NumericsError::ZeroVariance { what: "targets" });
    }
    let ss_res: f64 = truth
        .iter()
        .zip(pred)
        .map(|(t, p)| (t - p) * (t - p))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Principal components of a rows-as-samples matrix.
#[derive(Debug, Clone)]
pub struct PcaModel {
    /// Column means subtracted before projection (length d).
    pub mean: DVector<f64>,
    /// d × k matrix whose columns are the leading principal directions.
    pub components: DMatrix<f64>,
    /// Full covariance eigenvalue spectrum `sᵢ²/(n−1)`, descending.
    pub eigenvalues: Vec<f64>,
    /// Each eigenvalue over the spectrum total; same length as `eigenvalues`.
    pub variance_ratios: Vec<f64>,
}

/// Fit a `k`-component PCA. `k` must satisfy `1 ≤ k ≤ min(n−1, d)`.
pub fn pca_fit(a: &DMatrix<f64>, k: usize) -> Result<PcaModel, NumericsError> {
    let n = a.nrows();
    if n == 0 || a.ncols() == 0 {
        return Err(NumericsError::EmptyInput);
    }
    if n < 2 {
        return Err(NumericsError::ZeroVariance { what: "samples" });
    }
    let (centered, mean) = center_columns(a);
    let f = thin_svd(&centered)?;
    pca_from_centered_svd(&f, &mean, k)
}

/// [`pca_fit`] continued from a precomputed SVD of the centered data matrix.
pub fn pca_from_centered_svd(
    f: &SvdFactors,
    mean: &DVector<f64>,
    k: usize,
) -> Result<PcaModel, NumericsError> {
    let n = f.u.nrows();
    let d = f.v.nrows();
    if n < 2 {
        return Err(NumericsError::ZeroVariance { what: "samples" });
    }
    let max_k = (n - 1).min(d);
    if k == 0 || k > max_k {
        return Err(NumericsError::InvalidComponentCount { k, max: max_k });
    }
    let denom = (n - 1) as f64;
    let eigenvalues: Vec<f64> = f.s.iter().map(|s| s * s / denom).collect();
    let total: f64 = eigenvalues.iter().sum();
    if total <= 0.0 {
        return Err(NumericsError::ZeroVariance { what: "embeddings" });
    }
    let variance_ratios = eigenvalues.iter().map(|e| e / total).collect();
    Ok(PcaModel {
        mean: mean.clone(),
        components: f.v.columns(0, k).into_owned(),
        eigenvalues,
        variance_ratios,
    })
}

/// Project rows of `a` onto the fitted components (n × k scores).
pub fn pca_transform(model: &PcaModel, a: &DMatrix<f64>) -> Result<DMatrix<f64>, NumericsError> {
    if a.ncols() != model.mean.len() {
        return Err(NumericsError::DimensionMismatch {
            expected: model.mean.len(),
            got: a.ncols(),
        });
    }
    let mut centered = a.clone();
    for j in 0..a.ncols() {
        let m = model.mean[j];
        for i in 0..a.nrows() {
            centered[(i, j)] -= m;
        }
    }
    Ok(centered * &model.components)
}

/// Deterministic random orthogonal `d × d` matrix: QR of a seeded Gaussian
/// matrix, with each column's sign fixed so the factorization is unique.
pub fn random_orthogonal(d: usize, seed: u64) -> Result<DMatrix<f64>, NumericsError> {
    if d == 0 {
        return Err(NumericsError::EmptyInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: DMatrix<f64> = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            for i in 0..d {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(q)
}
