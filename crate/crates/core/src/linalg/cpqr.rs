use super::qr::{fix_signs, make_reflector, Reflectors};
use super::RANK_TOL;
use crate::matrix::{axpy, dot, norm2, DenseMatrix};
use crate::parallel;

/// `M Π = Q R`: column `perm[j]` of M is column j of `M Π`.
#[derive(Clone, Debug)]
pub struct PivotedQr {
    pub perm: Vec<usize>,
    /// rows x min(rows, cols), orthonormal columns.
    pub q: DenseMatrix,
    /// min(rows, cols) x cols upper trapezoidal, |R_ii| nonincreasing.
    pub r: DenseMatrix,
}

/// Greedy Householder CPQR on the rows of `t` (the transposed input).
/// Residual column norms are recomputed exactly in the same pass that applies
/// each reflector, so no downdating drift enters the pivot choice.
fn factor(t: &mut DenseMatrix, steps: usize, stop_tol: f64) -> (Vec<usize>, Vec<Vec<f64>>) {
    let (n, m) = t.shape();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut norms: Vec<f64> = (0..n).map(|j| norm2(t.row(j))).collect();
    let mut refl = Vec::with_capacity(steps);
    for s in 0..steps {
        let mut best = s;
        for j in s + 1..n {
            if norms[j] > norms[best] || (norms[j] == norms[best] && perm[j] < perm[best]) {
                best = j;
            }
        }
        if norms[best] <= stop_tol {
            break;
        }
        if best != s {
            perm.swap(s, best);
            norms.swap(s, best);
            let (lo, hi) = t.data_mut().split_at_mut(best * m);
            lo[s * m..(s + 1) * m].swap_with_slice(&mut hi[..m]);
        }
        let (v, beta) = make_reflector(&t.row(s)[s..]);
        if !v.is_empty() {
            let row = t.row_mut(s);
            row[s] = beta;
            row[s + 1..].iter_mut().for_each(|e| *e = 0.0);
            let tail = &mut t.data_mut()[(s + 1) * m..];
            parallel::for_each_row_with(tail, m, &mut norms[s + 1..], |_, row, nrm| {
                let x = &mut row[s..];
                let d = dot(&v, x);
                axpy(-d, &v, x);
                *nrm = norm2(&x[1..]);
            });
        } else {
            for j in s + 1..n {
                norms[j] = norm2(&t.row(j)[s + 1..]);
            }
        }
        refl.push(v);
    }
    (perm, refl)
}

/// Column-pivoted Householder QR. Rank deficiency shows up as trailing
/// near-zero diagonal entries of R and is never raised.
pub fn cpqr(m: &DenseMatrix) -> PivotedQr {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    let mut t = m.transpose();
    let (perm, mut refl) = factor(&mut t, k, 0.0);
    refl.resize(k, Vec::new());
    let reflectors = Reflectors::from_parts(rows, refl);
    let mut q = reflectors.thin_q(k);
    let mut r = DenseMatrix::zeros(k, cols);
    for j in 0..cols {
        for i in 0..k.min(j + 1) {
            r.set(i, j, t.get(j, i));
        }
    }
    fix_signs(&mut q, &mut r);
    PivotedQr { perm, q, r }
}

/// First `k` CPQR pivot columns, stopping early once every residual column is
/// negligible (relative 1e-12 of the largest column norm).
pub fn cpqr_pivots(m: &DenseMatrix, k: usize) -> Vec<usize> {
    let mut t = m.transpose();
    let max_norm = (0..t.rows()).map(|j| norm2(t.row(j))).fold(0.0, f64::max);
    let steps = k.min(m.rows()).min(m.cols());
    let (perm, refl) = factor(&mut t, steps, RANK_TOL * max_norm);
    perm[..refl.len()].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn first_pivot_is_largest_column() {
        let m = DenseMatrix::from_rows(&[vec![0.0, 5.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(cpqr(&m).perm[0], 1);
    }

    #[test]
    fn orthogonal_columns_pivot_by_norm() {
        let m = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 3.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        assert_eq!(cpqr(&m).perm, vec![1, 2, 0]);
    }

    #[test]
    fn reconstruction() {
        let mut g = rng::from_seed(2);
        for &(r, c) in &[(8, 5), (5, 8), (6, 6)] {
            let m = rng::gaussian_matrix(r, c, 1.0, &mut g);
            let f = cpqr(&m);
            let mp = m.select_columns(&f.perm);
            assert!(mp.sub(&f.q.matmul(&f.r)).fro_norm() < 1e-12 * m.fro_norm());
            let d: Vec<f64> = (0..r.min(c)).map(|i| f.r.get(i, i).abs()).collect();
            assert!(d.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rank_deficient_is_not_an_error() {
        let m = DenseMatrix::from_fn(5, 4, |i, j| ((i + 1) * (j + 1)) as f64);
        let f = cpqr(&m);
        assert!(f.r.get(1, 1).abs() < 1e-12 * f.r.get(0, 0).abs());
        assert_eq!(cpqr_pivots(&m, 4).len(), 1);
    }
}
