use super::RANK_TOL;
use crate::error::{Error, Result};
use crate::matrix::{axpy, DenseMatrix};
use crate::parallel;

/// `P M = L U` for a tall M: `perm[i]` is the input row placed at position i.
#[derive(Clone, Debug)]
pub struct PivotedLu {
    pub perm: Vec<usize>,
    /// rows x cols, unit lower trapezoidal, |entries| <= 1.
    pub l: DenseMatrix,
    /// cols x cols upper triangular.
    pub u: DenseMatrix,
    pub rank_detected: usize,
}

/// Eliminates in place, stopping after `steps` pivots or when the best pivot is
/// at or below `tol`. Returns the row permutation and the number of steps taken.
fn eliminate(w: &mut DenseMatrix, steps: usize, tol: f64) -> (Vec<usize>, usize) {
    let (rows, cols) = w.shape();
    let mut perm: Vec<usize> = (0..rows).collect();
    for t in 0..steps {
        // Largest |w[i][t]|; ties go to the lowest original row index.
        let mut best = t;
        let mut best_val = w.get(t, t).abs();
        for i in t + 1..rows {
            let v = w.get(i, t).abs();
            if v > best_val || (v == best_val && perm[i] < perm[best]) {
                best = i;
                best_val = v;
            }
        }
        if best_val <= tol {
            return (perm, t);
        }
        if best != t {
            perm.swap(t, best);
            let (lo, hi) = w.data_mut().split_at_mut(best * cols);
            lo[t * cols..(t + 1) * cols].swap_with_slice(&mut hi[..cols]);
        }
        let pivot_row = w.row(t).to_vec();
        let piv = pivot_row[t];
        let tail = &mut w.data_mut()[(t + 1) * cols..];
        parallel::for_each_row(tail, cols, |_, row| {
            if row[t] != 0.0 {
                let l = row[t] / piv;
                row[t] = l;
                axpy(-l, &pivot_row[t + 1..], &mut row[t + 1..]);
            }
        });
    }
    (perm, steps)
}

/// LU with partial (row) pivoting of a tall matrix.
pub fn lupp(m: &DenseMatrix) -> Result<PivotedLu> {
    let (rows, cols) = m.shape();
    if rows < cols {
        return Err(Error::BadShape(format!("lupp needs rows >= cols, got {rows}x{cols}")));
    }
    let mut w = m.clone();
    let (perm, rank) = eliminate(&mut w, cols, RANK_TOL * m.max_abs());
    if rank < cols {
        return Err(Error::RankDeficient { rank, needed: cols });
    }
    let mut l = DenseMatrix::zeros(rows, cols);
    let mut u = DenseMatrix::zeros(cols, cols);
    for i in 0..rows {
        for j in 0..cols {
            let v = w.get(i, j);
            if i == j {
                l.set(i, j, 1.0);
                u.set(i, j, v);
            } else if i > j {
                l.set(i, j, v);
            } else {
                u.set(i, j, v);
            }
        }
    }
    Ok(PivotedLu { perm, l, u, rank_detected: cols })
}

/// Row indices of the first `k` LUPP pivots of a tall matrix, truncated at the
/// detected rank instead of failing.
pub fn lupp_pivots(m: &DenseMatrix, k: usize) -> Vec<usize> {
    let mut w = m.clone();
    let steps = k.min(m.rows()).min(m.cols());
    let (perm, done) = eliminate(&mut w, steps, RANK_TOL * m.max_abs());
    perm[..done].to_vec()
}
