//! Reference implementations of the evaluation pipeline: centering, least
//! squares with an intercept, first-component PCA, and the per-fold metric
//! protocol, all built on the [`crate::linalg`] primitives.

use crate::linalg::{self, Mat};

/// Arithmetic mean.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation (divides by `n`, not `n - 1`).
pub fn pop_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Pearson correlation coefficient.
pub fn pearson_ref(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len());
    let (mu, mv) = (mean(u), mean(v));
    let mut cov = 0.0;
    let mut su = 0.0;
    let mut sv = 0.0;
    for (a, b) in u.iter().zip(v) {
        cov += (a - mu) * (b - mv);
        su += (a - mu) * (a - mu);
        sv += (b - mv) * (b - mv);
    }
    cov / (su.sqrt() * sv.sqrt())
}

/// Coefficient of determination of `y_pred` against `y_true`.
pub fn r2_ref(y_true: &[f64], y_pred: &[f64]) -> f64 {
    assert_eq!(y_true.len(), y_pred.len());
    let m = mean(y_true);
    let ss_res: f64 = y_true
        .iter()
        .zip(y_pred)
        .map(|(t, p)| (t - p) * (t - p))
        .sum();
    let ss_tot: f64 = y_true.iter().map(|t| (t - m) * (t - m)).sum();
    1.0 - ss_res / ss_tot
}

/// Column means of `a`.
pub fn column_means(a: &Mat) -> Vec<f64> {
    let n = a.len() as f64;
    let d = a[0].len();
    let mut mu = vec![0.0; d];
    for row in a {
        for (m, v) in mu.iter_mut().zip(row) {
            *m += v / n;
        }
    }
    mu
}

/// `a` with `mu` subtracted from every row.
pub fn subtract_row(a: &Mat, mu: &[f64]) -> Mat {
    a.iter()
        .map(|row| row.iter().zip(mu).map(|(v, m)| v - m).collect())
        .collect()
}

/// Minimum-norm least squares with a free intercept.
///
/// Centers predictors and target, applies the Gram-matrix pseudoinverse to the
/// centered system, and recovers the intercept from the means — the standard
/// way of keeping the intercept outside the norm being minimized. Returns
/// `(weights, intercept)`.
pub fn lstsq_with_intercept_ref(a: &Mat, y: &[f64], rcond: f64) -> (Vec<f64>, f64) {
    let mu = column_means(a);
    let ac = subtract_row(a, &mu);
    let my = mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - my).collect();
    let p = linalg::pinv(&ac, rcond);
    let w = linalg::mat_vec(&p, &yc);
    let intercept = my - mu.iter().zip(&w).map(|(m, wi)| m * wi).sum::<f64>();
    (w, intercept)
}

/// Apply a linear model to every row of `a`.
pub fn predict_ref(w: &[f64], intercept: f64, a: &Mat) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(w).map(|(v, wi)| v * wi).sum::<f64>() + intercept)
        .collect()
}

/// First principal component of `a` via a Jacobi eigendecomposition of
/// whichever Gram matrix is smaller.
pub struct Pca1Ref {
    /// Column means removed before the decomposition.
    pub mean: Vec<f64>,
    /// Unit-norm leading component (length `d`).
    pub component: Vec<f64>,
    /// All sample-covariance eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Leading eigenvalue over the full eigenvalue sum.
    pub variance_ratio: f64,
}

pub fn pca1_ref(a: &Mat) -> Pca1Ref {
    let n = a.len();
    let d = a[0].len();
    let mu = column_means(a);
    let ac = subtract_row(a, &mu);
    let denom = (n - 1) as f64;

    if d <= n {
        // Covariance route: eigenvectors are the components directly.
        let cov = scale(&linalg::mat_mul(&linalg::transpose(&ac), &ac), 1.0 / denom);
        let (lam, v) = linalg::jacobi_eigh(&cov);
        let component: Vec<f64> = (0..d).map(|i| v[i][0]).collect();
        let total: f64 = lam.iter().map(|l| l.max(0.0)).sum();
        Pca1Ref {
            mean: mu,
            variance_ratio: lam[0].max(0.0) / total,
            eigenvalues: lam,
            component,
        }
    } else {
        // Gram route: eigenvectors of (Ac Ac^T)/(n-1) give scores; map back
        // through Ac^T and normalize to get the component.
        let gram = scale(&linalg::mat_mul(&ac, &linalg::transpose(&ac)), 1.0 / denom);
        let (lam, u) = linalg::jacobi_eigh(&gram);
        let u0: Vec<f64> = (0..n).map(|i| u[i][0]).collect();
        let mut component = linalg::mat_vec(&linalg::transpose(&ac), &u0);
        let norm = component.iter().map(|v| v * v).sum::<f64>().sqrt();
        for c in &mut component {
            *c /= norm;
        }
        let total: f64 = lam.iter().map(|l| l.max(0.0)).sum();
        Pca1Ref {
            mean: mu,
            variance_ratio: lam[0].max(0.0) / total,
            eigenvalues: lam,
            component,
        }
    }
}

fn scale(a: &Mat, factor: f64) -> Mat {
    a.iter()
        .map(|row| row.iter().map(|v| v * factor).collect())
        .collect()
}

/// Per-fold metric triple computed with the reference primitives.
pub struct RefTriple {
    pub linear_r2: Vec<f64>,
    pub pca_r2: Vec<f64>,
    pub pca_vr: Vec<f64>,
}

/// Reference evaluation protocol over an existing fold assignment.
///
/// For every fold: fit on the complement, score on the fold. The linear metric
/// fits the full least-squares model; the PCA metrics fit a one-component
/// model on the training rows, regress the training scores onto the target
/// with a univariate fit, and evaluate on the held-out scores. Folds are
/// assumed non-degenerate (the fixtures that use this are).
pub fn fold_metrics_ref(e: &Mat, x: &[f64], fold_of: &[usize], k: usize, rcond: f64) -> RefTriple {
    let mut out = RefTriple {
        linear_r2: Vec::new(),
        pca_r2: Vec::new(),
        pca_vr: Vec::new(),
    };
    for fold in 0..k {
        let train_idx: Vec<usize> = (0..e.len()).filter(|i| fold_of[*i] != fold).collect();
        let test_idx: Vec<usize> = (0..e.len()).filter(|i| fold_of[*i] == fold).collect();
        let take = |idx: &[usize]| -> Mat { idx.iter().map(|&i| e[i].clone()).collect() };
        let take_x = |idx: &[usize]| -> Vec<f64> { idx.iter().map(|&i| x[i]).collect() };
        let (tr, te) = (take(&train_idx), take(&test_idx));
        let (xtr, xte) = (take_x(&train_idx), take_x(&test_idx));

        let (w, b) = lstsq_with_intercept_ref(&tr, &xtr, rcond);
        out.linear_r2.push(r2_ref(&xte, &predict_ref(&w, b, &te)));

        let pca = pca1_ref(&tr);
        let score = |rows: &Mat| -> Vec<f64> {
            rows.iter()
                .map(|row| {
                    row.iter()
                        .zip(&pca.mean)
                        .zip(&pca.component)
                        .map(|((v, m), c)| (v - m) * c)
                        .sum()
                })
                .collect()
        };
        let str_ = score(&tr);
        let ste = score(&te);
        // Univariate fit score -> x on the training rows.
        let (sm, xm) = (mean(&str_), mean(&xtr));
        let cov: f64 = str_
            .iter()
            .zip(&xtr)
            .map(|(s, v)| (s - sm) * (v - xm))
            .sum();
        let var: f64 = str_.iter().map(|s| (s - sm) * (s - sm)).sum();
        let slope = cov / var;
        let intercept = xm - slope * sm;
        let pred: Vec<f64> = ste.iter().map(|s| slope * s + intercept).collect();
        out.pca_r2.push(r2_ref(&xte, &pred));
        out.pca_vr.push(pca.variance_ratio);
    }
    out
}
