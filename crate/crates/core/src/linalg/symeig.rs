//! Eigenvalues of symmetric matrices through Householder tridiagonalisation.

use crate::matrix::{axpy, dot, DenseMatrix};

/// Reduces a symmetric matrix to tridiagonal form `(diag, offdiag)` with the
/// same eigenvalues. Only the values are kept.
pub(crate) fn tridiagonalize(s: &DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = s.rows();
    let mut a = s.data().to_vec();
    let mut p = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<f64> = (k + 1..n).map(|i| a[i * n + k]).collect();
        let alpha = crate::matrix::norm2(&x);
        if alpha == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let alpha = if x[0] > 0.0 { -alpha } else { alpha };
        let mut v = x;
        v[0] -= alpha;
        let vn = crate::matrix::norm2(&v);
        v.iter_mut().for_each(|t| *t *= std::f64::consts::SQRT_2 / vn);
        off[k] = alpha;
        // Trailing block B <- H B H with H = I - v v^T, ||v||^2 = 2.
        for (i, pi) in p[..m].iter_mut().enumerate() {
            let row = &a[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            *pi = dot(row, &v);
        }
        let c = 0.5 * dot(&p[..m], &v);
        let w: Vec<f64> = p[..m].iter().zip(&v).map(|(pi, vi)| pi - c * vi).collect();
        for i in 0..m {
            let row = &mut a[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            axpy(-v[i], &w, row);
            axpy(-w[i], &v, row);
        }
    }
    if n >= 2 {
        off[n - 2] = a[(n - 1) * n + n - 2];
    }
    let diag = (0..n).map(|i| a[i * n + i]).collect();
    (diag, off)
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let e2 = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        q = d[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue of a symmetric tridiagonal matrix by bisection.
pub(crate) fn largest_eigenvalue(d: &[f64], e: &[f64]) -> f64 {
    let n = d.len();
    if n == 0 {
        return 0.0;
    }
    let radius = |i: usize| {
        (if i > 0 { e[i - 1].abs() } else { 0.0 }) + (if i + 1 < n { e[i].abs() } else { 0.0 })
    };
    let mut lo = (0..n).map(|i| d[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| d[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, e, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
