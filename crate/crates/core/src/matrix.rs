use crate::error::{Error, Result};
use crate::parallel;

/// Dense row-major real matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

// Output rows per parallel task and the k/j tile sizes of the matmul kernels.
const ROW_CHUNK: usize = 8;
const K_TILE: usize = 128;
const J_TILE: usize = 512;

impl DenseMatrix {
    /// Checked constructor: `data` is row-major and every entry must be finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::BadLength { rows, cols, len: data.len() });
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    /// # Panics
    /// If `f` returns a non-finite value.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                assert!(v.is_finite(), "non-finite entry at ({i}, {j})");
                data.push(v);
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in d.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let (m, n) = (self.rows, self.cols);
        let mut t = vec![0.0; m * n];
        // Blocked to keep both sides cache friendly.
        const B: usize = 32;
        for ib in (0..m).step_by(B) {
            for jb in (0..n).step_by(B) {
                for i in ib..(ib + B).min(m) {
                    for j in jb..(jb + B).min(n) {
                        t[j * m + i] = self.data[i * n + j];
                    }
                }
            }
        }
        Self::from_vec(n, m, t)
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut out = Vec::with_capacity(self.rows * idx.len());
        for i in 0..self.rows {
            let r = self.row(i);
            out.extend(idx.iter().map(|&j| r[j]));
        }
        Self::from_vec(self.rows, idx.len(), out)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut out = Vec::with_capacity(self.cols * idx.len());
        for &i in idx {
            out.extend_from_slice(self.row(i));
        }
        Self::from_vec(idx.len(), self.cols, out)
    }

    /// Columns `start..end`.
    pub fn column_range(&self, start: usize, end: usize) -> Self {
        let w = end - start;
        let mut out = Vec::with_capacity(self.rows * w);
        for i in 0..self.rows {
            out.extend_from_slice(&self.row(i)[start..end]);
        }
        Self::from_vec(self.rows, w, out)
    }

    /// Rows `start..end`.
    pub fn row_range(&self, start: usize, end: usize) -> Self {
        Self::from_vec(
            end - start,
            self.cols,
            self.data[start * self.cols..end * self.cols].to_vec(),
        )
    }

    /// `[self, other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let mut out = Vec::with_capacity(self.rows * (self.cols + other.cols));
        for i in 0..self.rows {
            out.extend_from_slice(self.row(i));
            out.extend_from_slice(other.row(i));
        }
        Self::from_vec(self.rows, self.cols + other.cols, out)
    }

    pub fn fro_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_vec(self.rows, self.cols, self.data.iter().map(|x| c * x).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "sub shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self::from_vec(self.rows, self.cols, data)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "add shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self::from_vec(self.rows, self.cols, data)
    }

    /// Multiplies column j by `d[j]`.
    pub fn scale_columns(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.cols);
        let mut out = self.clone();
        for i in 0..self.rows {
            for (x, s) in out.row_mut(i).iter_mut().zip(d) {
                *x *= s;
            }
        }
        out
    }

    /// Multiplies row i by `d[i]`.
    pub fn scale_rows(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.rows);
        let mut out = self.clone();
        for (i, s) in d.iter().enumerate() {
            for x in out.row_mut(i) {
                *x *= s;
            }
        }
        out
    }

    /// `self * other`.
    ///
    /// # Panics
    /// On inner-dimension mismatch.
    pub fn matmul(&self, other: &Self) -> Self {
        let mut c = Self::zeros(self.rows, other.cols);
        gemm_acc(&mut c, self, other);
        c
    }

    /// `self^T * other`.
    pub fn t_matmul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "t_matmul inner mismatch");
        self.transpose().matmul(other)
    }

    /// `self * other^T`, as row-by-row dot products.
    pub fn matmul_t(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "matmul_t inner mismatch");
        let n = other.rows;
        let mut c = Self::zeros(self.rows, n);
        parallel::for_each_row(&mut c.data, n, |i, out| {
            let a = self.row(i);
            for (j, o) in out.iter_mut().enumerate() {
                *o = dot(a, other.row(j));
            }
        });
        c
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "matvec length mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn t_matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "t_matvec length mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            axpy(vi, self.row(i), &mut out);
        }
        out
    }
}

/// `c += a * b`. Each entry of `c` accumulates its products in increasing k,
/// whatever the tiling or thread count, so splitting `a`'s columns (and `b`'s
/// rows) into consecutive blocks and calling this per block is bit-identical
/// to one call on the whole product.
pub fn gemm_acc(c: &mut DenseMatrix, a: &DenseMatrix, b: &DenseMatrix) {
    assert_eq!(a.cols, b.rows, "matmul inner mismatch");
    assert_eq!((c.rows, c.cols), (a.rows, b.cols), "matmul output mismatch");
    let (kk, n) = (a.cols, b.cols);
    if n == 0 || kk == 0 {
        return;
    }
    let kernel = |chunk: usize, block: &mut [f64]| {
        let i0 = chunk * ROW_CHUNK;
        let nrows = block.len() / n;
        for jb in (0..n).step_by(J_TILE) {
            let je = (jb + J_TILE).min(n);
            for kb in (0..kk).step_by(K_TILE) {
                let ke = (kb + K_TILE).min(kk);
                for r in 0..nrows {
                    let arow = a.row(i0 + r);
                    let crow = &mut block[r * n + jb..r * n + je];
                    for (k, &aik) in arow.iter().enumerate().take(ke).skip(kb) {
                        if aik != 0.0 {
                            axpy(aik, &b.row(k)[jb..je], crow);
                        }
                    }
                }
            }
        }
    };
    parallel::for_each_row(&mut c.data, n * ROW_CHUNK, kernel);
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four independent partial sums let the compiler vectorise.
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for t in 0..4 {
            acc[t] += x[t] * y[t];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    (acc[0] + acc[2]) + (acc[1] + acc[3]) + tail
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Euclidean norm, scaled to avoid overflow on huge entries.
pub fn norm2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    if scale > 1e150 || scale < 1e-150 {
        let s: f64 = x.iter().map(|v| (v / scale) * (v / scale)).sum();
        scale * s.sqrt()
    } else {
        dot(x, x).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_rejects_bad_input() {
        assert!(matches!(
            DenseMatrix::new(2, 2, vec![1.0; 3]),
            Err(Error::BadLength { .. })
        ));
        assert!(matches!(
            DenseMatrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite(1))
        ));
    }

    #[test]
    fn small_products() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[vec![1.0, 0.0, 2.0], vec![0.0, 1.0, -1.0]]).unwrap();
        let ab = a.matmul(&b);
        assert_eq!(ab.row(0), &[1.0, 2.0, 0.0]);
        assert_eq!(ab.row(2), &[5.0, 6.0, 4.0]);
        assert_eq!(a.t_matmul(&a), a.transpose().matmul(&a));
        assert_eq!(a.matmul_t(&a), a.matmul(&a.transpose()));
        assert_eq!(a.matvec(&[1.0, 1.0]), vec![3.0, 7.0, 11.0]);
        assert_eq!(a.t_matvec(&[1.0, 1.0, 1.0]), vec![9.0, 12.0]);
    }

    #[test]
    fn tiled_matmul_matches_naive() {
        let a = DenseMatrix::from_fn(37, 300, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let b = DenseMatrix::from_fn(300, 600, |i, j| ((i * 5 + j) % 13) as f64 * 0.25);
        let c = a.matmul(&b);
        for &(i, j) in &[(0, 0), (36, 599), (17, 513), (8, 128)] {
            let want: f64 = (0..300).map(|k| a.get(i, k) * b.get(k, j)).sum();
            assert!((c.get(i, j) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn blockwise_accumulation_is_bitwise() {
        let a = DenseMatrix::from_fn(9, 50, |i, j| ((i + 1) as f64).sin() * (j as f64 + 0.5).cos());
        let b = DenseMatrix::from_fn(50, 7, |i, j| ((i * j) as f64 * 0.1).sin());
        let whole = a.matmul(&b);
        let mut split = DenseMatrix::zeros(9, 7);
        gemm_acc(&mut split, &a.column_range(0, 23), &b.row_range(0, 23));
        gemm_acc(&mut split, &a.column_range(23, 50), &b.row_range(23, 50));
        assert_eq!(whole, split);
    }

    #[test]
    fn selection_and_stacking() {
        let a = DenseMatrix::from_fn(3, 4, |i, j| (i * 4 + j) as f64);
        assert_eq!(a.select_columns(&[3, 0]).row(1), &[7.0, 4.0]);
        assert_eq!(a.select_rows(&[2]).row(0), &[8.0, 9.0, 10.0, 11.0]);
        assert_eq!(a.column_range(1, 3).hstack(&a.column_range(3, 4)), a.column_range(1, 4));
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn norm2_survives_extreme_scales() {
        assert!((norm2(&[3e200, 4e200]) / 5e200 - 1.0).abs() < 1e-15);
        assert!((norm2(&[3e-200, 4e-200]) - 5e-200).abs() < 1e-214);
        assert_eq!(norm2(&[]), 0.0);
    }
}
