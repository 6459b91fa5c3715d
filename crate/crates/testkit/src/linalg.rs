//! Plain-`Vec` linear algebra: cyclic Jacobi eigendecomposition, Gauss-Jordan
//! inversion, and a Gram-matrix pseudoinverse built on top of them.

/// Row-major dense matrix as nested `Vec`s.
pub type Mat = Vec<Vec<f64>>;

/// `rows x cols` zero matrix.
pub fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![0.0; cols]; rows]
}

/// Identity matrix of order `n`.
pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

/// Transpose of `a`.
pub fn transpose(a: &Mat) -> Mat {
    if a.is_empty() {
        return Vec::new();
    }
    let (rows, cols) = (a.len(), a[0].len());
    let mut t = zeros(cols, rows);
    for i in 0..rows {
        for j in 0..cols {
            t[j][i] = a[i][j];
        }
    }
    t
}

/// Matrix product `a * b`.
pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let (n, k) = (a.len(), a[0].len());
    let m = b[0].len();
    assert_eq!(k, b.len(), "inner dimensions must agree");
    let mut out = zeros(n, m);
    for i in 0..n {
        for (l, &ail) in a[i].iter().enumerate() {
            if ail == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += ail * b[l][j];
            }
        }
    }
    out
}

/// Matrix-vector product `a * x`.
pub fn mat_vec(a: &Mat, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}

/// Frobenius norm of `a`.
pub fn frobenius(a: &Mat) -> f64 {
    a.iter()
        .flat_map(|row| row.iter())
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvalues sorted descending
/// and eigenvectors as the *columns* of the returned matrix, in matching
/// order. Input symmetry is the caller's responsibility; only the upper
/// triangle drives the rotations but both halves are updated.
pub fn jacobi_eigh(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.len();
    assert!(n > 0 && a[0].len() == n, "matrix must be square");
    let mut m = a.clone();
    let mut v = identity(n);
    let scale = frobenius(a).max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p][q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                // Classic 2x2 symmetric Schur rotation annihilating m[p][q].
                let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let (mip, miq) = (m[i][p], m[i][q]);
                    m[i][p] = c * mip - s * miq;
                    m[i][q] = s * mip + c * miq;
                }
                for j in 0..n {
                    let (mpj, mqj) = (m[p][j], m[q][j]);
                    m[p][j] = c * mpj - s * mqj;
                    m[q][j] = s * mpj + c * mqj;
                }
                for i in 0..n {
                    let (vip, viq) = (v[i][p], v[i][q]);
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].partial_cmp(&m[i][i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[i][i]).collect();
    let mut vectors = zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i][new_col] = v[i][old_col];
        }
    }
    (eigenvalues, vectors)
}

/// Inverse of a square matrix by Gauss-Jordan elimination with partial
/// pivoting, or `None` if a pivot collapses to (near) zero.
pub fn gauss_jordan_inverse(a: &Mat) -> Option<Mat> {
    let n = a.len();
    assert!(n > 0 && a[0].len() == n, "matrix must be square");
    let mut work = a.clone();
    let mut inv = identity(n);

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| work[i][col].abs().partial_cmp(&work[j][col].abs()).unwrap())?;
        if work[pivot_row][col].abs() < 1e-300 {
            return None;
        }
        work.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = work[col][col];
        for j in 0..n {
            work[col][j] /= pivot;
            inv[col][j] /= pivot;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = work[row][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..n {
                work[row][j] -= factor * work[col][j];
                inv[row][j] -= factor * inv[col][j];
            }
        }
    }
    Some(inv)
}

/// Moore-Penrose pseudoinverse via an explicit Gram-matrix eigendecomposition.
///
/// For `a` of shape `n x d` the Gram matrix of the smaller side is
/// diagonalized with [`jacobi_eigh`]; eigenvalues at or below
/// `(rcond * s_max)^2` are treated as exact zeros, which makes the routine
/// rank-aware (centered matrices with a null direction are fine).
pub fn pinv(a: &Mat, rcond: f64) -> Mat {
    let n = a.len();
    let d = a[0].len();
    let at = transpose(a);
    if n <= d {
        // a = U S V^T  =>  a^+ = a^T U S^-2 U^T  (thin, zeroed null space)
        let gram = mat_mul(a, &at); // n x n = U S^2 U^T
        let (lam, u) = jacobi_eigh(&gram);
        let inv_diag = eigen_reciprocal(&lam, rcond);
        let scaled = scale_columns(&u, &inv_diag);
        mat_mul(&at, &mat_mul(&scaled, &transpose(&u)))
    } else {
        // a^+ = V S^-2 V^T a^T
        let gram = mat_mul(&at, a); // d x d = V S^2 V^T
        let (lam, v) = jacobi_eigh(&gram);
        let inv_diag = eigen_reciprocal(&lam, rcond);
        let scaled = scale_columns(&v, &inv_diag);
        mat_mul(&mat_mul(&scaled, &transpose(&v)), &at)
    }
}

/// Reciprocals of Gram eigenvalues with the relative cutoff applied.
fn eigen_reciprocal(lam: &[f64], rcond: f64) -> Vec<f64> {
    let lam_max = lam.iter().cloned().fold(0.0_f64, f64::max);
    // Forming the Gram matrix explicitly floors its small eigenvalues at
    // roughly n * eps * lam_max of numerical noise, far above rcond^2 *
    // lam_max for tiny rcond. Anything below that floor is indistinguishable
    // from an exact zero and must be dropped, or its huge reciprocal would
    // amplify pure rounding error.
    let noise_floor = lam.len() as f64 * f64::EPSILON;
    let cutoff = lam_max * (rcond * rcond).max(noise_floor);
    lam.iter()
        .map(|&l| if l > cutoff && l > 0.0 { 1.0 / l } else { 0.0 })
        .collect()
}

/// Multiply column `j` of `m` by `factors[j]`.
fn scale_columns(m: &Mat, factors: &[f64]) -> Mat {
    m.iter()
        .map(|row| row.iter().zip(factors).map(|(v, f)| v * f).collect())
        .collect()
}
