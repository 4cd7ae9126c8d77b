use super::RANK_TOL;
use crate::error::{Error, Result};
use crate::matrix::{axpy, dot, norm2, DenseMatrix};
use crate::parallel;

/// Thin Householder QR of a tall matrix, `M = Q R` with `diag(R) >= 0`.
#[derive(Clone, Debug)]
pub struct Qr {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
}

/// Householder reflectors stored on the rows of the transposed input, so
/// every column operation is a contiguous slice.
pub(crate) struct Reflectors {
    m: usize,
    /// Row j holds the reflector for step j in entries j..m (zero when skipped).
    v: Vec<Vec<f64>>,
}

impl Reflectors {
    pub(crate) fn from_parts(m: usize, v: Vec<Vec<f64>>) -> Self {
        Self { m, v }
    }

    /// Applies `H_0 H_1 ... H_{k-1}` to each row of `t` (rows are length-m vectors).
    pub(crate) fn apply_q(&self, t: &mut DenseMatrix) {
        let m = self.m;
        parallel::for_each_row(t.data_mut(), m, |_, x| {
            for (j, v) in self.v.iter().enumerate().rev() {
                reflect(v, &mut x[j..]);
            }
        });
    }

    /// Thin Q (m x k).
    pub(crate) fn thin_q(&self, k: usize) -> DenseMatrix {
        let mut qt = DenseMatrix::zeros(k, self.m);
        for j in 0..k {
            qt.set(j, j, 1.0);
        }
        self.apply_q(&mut qt);
        qt.transpose()
    }
}

/// `x -= 2 v (v.x) / (v.v)` with v normalised so that `v.v = 2`; empty v is identity.
#[inline]
fn reflect(v: &[f64], x: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    let s = dot(v, x);
    axpy(-s, v, x);
}

/// Builds the reflector that maps `x` onto `-sign(x0) ||x|| e1`, scaled so
/// `H = I - v v^T`. Returns the new leading entry; `v` is empty for a zero `x`.
pub(crate) fn make_reflector(x: &[f64]) -> (Vec<f64>, f64) {
    let alpha = norm2(x);
    if alpha == 0.0 {
        return (Vec::new(), 0.0);
    }
    let beta = if x[0] >= 0.0 { -alpha } else { alpha };
    let mut v = x.to_vec();
    v[0] -= beta;
    let vn = norm2(&v);
    if vn == 0.0 {
        return (Vec::new(), x[0]);
    }
    let s = std::f64::consts::SQRT_2 / vn;
    v.iter_mut().for_each(|e| *e *= s);
    (v, beta)
}

/// Factors the rows of `t` (the transposed input, n x m), in place.
/// Returns the reflectors and the first-step residual norms.
pub(crate) fn factor_transposed(t: &mut DenseMatrix) -> (Reflectors, Vec<f64>) {
    let (n, m) = t.shape();
    let k = n.min(m);
    let mut refl = Vec::with_capacity(k);
    let mut norms = Vec::with_capacity(k);
    for j in 0..k {
        let (v, beta) = {
            let x = &t.row(j)[j..];
            norms.push(norm2(x));
            make_reflector(x)
        };
        {
            let row = t.row_mut(j);
            if !v.is_empty() {
                row[j] = beta;
                row[j + 1..].iter_mut().for_each(|e| *e = 0.0);
            }
        }
        if !v.is_empty() && j + 1 < n {
            let tail = &mut t.data_mut()[(j + 1) * m..];
            parallel::for_each_row(tail, m, |_, row| reflect(&v, &mut row[j..]));
        }
        refl.push(v);
    }
    (Reflectors { m, v: refl }, norms)
}

/// Thin Householder QR of `m` (rows >= cols). Never fails: rank-deficient
/// input yields zeros on the diagonal of R while Q stays orthonormal.
pub fn householder_qr(m: &DenseMatrix) -> Qr {
    let (rows, cols) = m.shape();
    assert!(rows >= cols, "householder_qr needs rows >= cols");
    let mut t = m.transpose();
    let (refl, _) = factor_transposed(&mut t);
    let mut q = refl.thin_q(cols);
    let mut r = DenseMatrix::zeros(cols, cols);
    for j in 0..cols {
        for i in 0..=j {
            r.set(i, j, t.get(j, i));
        }
    }
    fix_signs(&mut q, &mut r);
    Qr { q, r }
}

/// Flips signs so that `diag(R) >= 0`.
pub(crate) fn fix_signs(q: &mut DenseMatrix, r: &mut DenseMatrix) {
    for i in 0..r.rows() {
        if r.get(i, i) < 0.0 {
            for x in r.row_mut(i) {
                *x = -*x;
            }
            for row in 0..q.rows() {
                q.set(row, i, -q.get(row, i));
            }
        }
    }
}

/// Orthonormal basis of `range(m)` for a tall, full-column-rank `m`.
pub fn qr_ortho(m: &DenseMatrix) -> Result<DenseMatrix> {
    qr_ortho_tol(m, RANK_TOL)
}

/// [`qr_ortho`] with an explicit relative rank tolerance (against `||M||_F`).
pub fn qr_ortho_tol(m: &DenseMatrix, rel_tol: f64) -> Result<DenseMatrix> {
    let (rows, cols) = m.shape();
    if rows < cols {
        return Err(Error::BadShape(format!("qr_ortho needs rows >= cols, got {rows}x{cols}")));
    }
    let mut t = m.transpose();
    let (refl, norms) = factor_transposed(&mut t);
    let tol = rel_tol * m.fro_norm();
    if let Some(j) = norms.iter().position(|&x| x <= tol) {
        return Err(Error::RankDeficient { rank: j, needed: cols });
    }
    let mut q = refl.thin_q(cols);
    let mut r = DenseMatrix::zeros(cols, cols);
    for j in 0..cols {
        r.set(j, j, t.get(j, j));
    }
    fix_signs(&mut q, &mut r);
    Ok(q)
}
