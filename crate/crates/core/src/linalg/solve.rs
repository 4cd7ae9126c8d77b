use super::RANK_TOL;
use crate::matrix::{axpy, DenseMatrix};

/// Solves `A X = B` for square `A` by LU with partial pivoting.
/// Returns `None` when a pivot falls to `1e-12 * max|A|` or below.
pub fn solve_square(a: &DenseMatrix, b: &DenseMatrix) -> Option<DenseMatrix> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "solve_square needs a square matrix");
    assert_eq!(b.rows(), n, "solve_square right-hand side mismatch");
    let tol = RANK_TOL * a.max_abs();
    let mut w = a.clone();
    let mut x = b.clone();
    for t in 0..n {
        let mut p = t;
        for i in t + 1..n {
            if w.get(i, t).abs() > w.get(p, t).abs() {
                p = i;
            }
        }
        let piv = w.get(p, t);
        if piv.abs() <= tol || piv == 0.0 {
            return None;
        }
        if p != t {
            swap_rows(&mut w, t, p);
            swap_rows(&mut x, t, p);
        }
        let wt = w.row(t).to_vec();
        let xt = x.row(t).to_vec();
        for i in t + 1..n {
            let l = w.get(i, t) / piv;
            if l != 0.0 {
                axpy(-l, &wt[t..], &mut w.row_mut(i)[t..]);
                axpy(-l, &xt, x.row_mut(i));
            }
        }
    }
    Some(upper_solve(&w, &x))
}

/// Solves `U X = B` for upper-triangular `U` (entries below the diagonal ignored).
pub fn upper_solve(u: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let n = u.rows();
    let mut x = b.clone();
    for i in (0..n).rev() {
        let d = u.get(i, i);
        for j in i + 1..n {
            let uij = u.get(i, j);
            if uij != 0.0 {
                let xj = x.row(j).to_vec();
                axpy(-uij, &xj, x.row_mut(i));
            }
        }
        for v in x.row_mut(i) {
            *v /= d;
        }
    }
    x
}

fn swap_rows(m: &mut DenseMatrix, a: usize, b: usize) {
    let (lo, hi) = (a.min(b), a.max(b));
    let cols = m.cols();
    let (x, y) = m.data_mut().split_at_mut(hi * cols);
    x[lo * cols..(lo + 1) * cols].swap_with_slice(&mut y[..cols]);
}

/// `A - Q (Q^T A)` for orthonormal-column `Q`.
pub fn project_out(q: &DenseMatrix, a: &DenseMatrix) -> DenseMatrix {
    a.sub(&q.matmul(&q.t_matmul(a)))
}

/// `A - (A Q) Q^T` for orthonormal-column `Q` (n x k) and `A` with n columns.
pub fn project_out_rows(a: &DenseMatrix, q: &DenseMatrix) -> DenseMatrix {
    a.sub(&a.matmul(q).matmul_t(q))
}
