//! Random embeddings `Γ: R^m -> R^l` (Gaussian, SRTT, sparse sign).

use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng as _;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::matrix::{axpy, DenseMatrix};
use crate::operator::LinearOperator;
use crate::{parallel, rng};

/// Which embedding family to draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbeddingKind {
    Gaussian,
    Srtt,
    /// `None` means ζ = min(l, 8).
    SparseSign(Option<usize>),
}

#[derive(Clone, Debug)]
pub enum SketchKind {
    /// Explicit l x m matrix with N(0, 1/l) entries.
    Gaussian(DenseMatrix),
    /// `sqrt(m/l) · rows(perm_out) · DHT · diag(signs) · perm_in`.
    Srtt {
        perm_out: Vec<usize>,
        signs: Vec<f64>,
        perm_in: Vec<usize>,
    },
    /// Column j has nonzeros `±1/sqrt(ζ)` at rows `supports[j*ζ..(j+1)*ζ]`.
    SparseSign {
        zeta: usize,
        supports: Vec<usize>,
        signs: Vec<f64>,
    },
}

#[derive(Clone, Debug)]
pub struct SketchOperator {
    pub kind: SketchKind,
    pub out_dim: usize,
    pub in_dim: usize,
    pub seed: u64,
}

fn check_dims(l: usize, m: usize) -> Result<()> {
    if l == 0 || l > m {
        return Err(Error::BadShape(format!("sketch needs 1 <= l <= m, got l={l}, m={m}")));
    }
    Ok(())
}

pub fn make_gaussian(l: usize, m: usize, seed: u64) -> Result<SketchOperator> {
    check_dims(l, m)?;
    let mut g = rng::from_seed(seed);
    let mat = rng::gaussian_matrix(l, m, 1.0 / (l as f64).sqrt(), &mut g);
    Ok(SketchOperator { kind: SketchKind::Gaussian(mat), out_dim: l, in_dim: m, seed })
}

pub fn make_srtt(l: usize, m: usize, seed: u64) -> Result<SketchOperator> {
    check_dims(l, m)?;
    let mut g = rng::from_seed(seed);
    let perm_in = sample(&mut g, m, m).into_vec();
    let signs = (0..m).map(|_| if g.random::<bool>() { 1.0 } else { -1.0 }).collect();
    let perm_out = sample(&mut g, m, l).into_vec();
    Ok(SketchOperator { kind: SketchKind::Srtt { perm_out, signs, perm_in }, out_dim: l, in_dim: m, seed })
}

/// SRTT from explicit parts; `perm_out` lists the l kept transform rows.
pub fn srtt_from_parts(
    perm_out: Vec<usize>,
    signs: Vec<f64>,
    perm_in: Vec<usize>,
    seed: u64,
) -> Result<SketchOperator> {
    let m = perm_in.len();
    let l = perm_out.len();
    check_dims(l, m)?;
    if signs.len() != m || signs.iter().any(|&s| s != 1.0 && s != -1.0) {
        return Err(Error::BadShape("signs must be m values in {-1, +1}".into()));
    }
    if !is_injective(&perm_in, m) || !is_injective(&perm_out, m) {
        return Err(Error::BadShape("SRTT index maps must be injective into 0..m".into()));
    }
    Ok(SketchOperator { kind: SketchKind::Srtt { perm_out, signs, perm_in }, out_dim: l, in_dim: m, seed })
}

fn is_injective(p: &[usize], m: usize) -> bool {
    let mut seen = vec![false; m];
    p.iter().all(|&i| i < m && !std::mem::replace(&mut seen[i], true))
}

/// Sparse sign embedding with ζ nonzeros per column (`None`: ζ = min(l, 8)).
pub fn make_sparse_sign(l: usize, m: usize, zeta: Option<usize>, seed: u64) -> Result<SketchOperator> {
    check_dims(l, m)?;
    let zeta = zeta.unwrap_or(l.min(8));
    if zeta < 2 || zeta > l {
        return Err(Error::BadShape(format!("sparse sign needs 2 <= zeta <= l, got zeta={zeta}, l={l}")));
    }
    let mut g = rng::from_seed(seed);
    let mut supports = Vec::with_capacity(m * zeta);
    let mut signs = Vec::with_capacity(m * zeta);
    let s = 1.0 / (zeta as f64).sqrt();
    for _ in 0..m {
        supports.extend(sample(&mut g, l, zeta).into_iter());
        signs.extend((0..zeta).map(|_| if g.random::<bool>() { s } else { -s }));
    }
    Ok(SketchOperator { kind: SketchKind::SparseSign { zeta, supports, signs }, out_dim: l, in_dim: m, seed })
}

pub fn make(kind: EmbeddingKind, l: usize, m: usize, seed: u64) -> Result<SketchOperator> {
    match kind {
        EmbeddingKind::Gaussian => make_gaussian(l, m, seed),
        EmbeddingKind::Srtt => make_srtt(l, m, seed),
        EmbeddingKind::SparseSign(z) => make_sparse_sign(l, m, z, seed),
    }
}

/// Orthonormal discrete Hartley transform via a complex FFT:
/// `H_k = (Re F_k - Im F_k) / sqrt(m)`.
struct Hartley {
    fft: Arc<dyn Fft<f64>>,
    m: usize,
}

impl Hartley {
    fn new(m: usize) -> Self {
        Self { fft: FftPlanner::new().plan_fft_forward(m), m }
    }

    fn transform(&self, x: &mut [f64], buf: &mut Vec<Complex<f64>>, scratch: &mut Vec<Complex<f64>>) {
        buf.clear();
        buf.extend(x.iter().map(|&v| Complex::new(v, 0.0)));
        scratch.resize(self.fft.get_inplace_scratch_len(), Complex::new(0.0, 0.0));
        self.fft.process_with_scratch(buf, scratch);
        let s = 1.0 / (self.m as f64).sqrt();
        for (o, c) in x.iter_mut().zip(buf.iter()) {
            *o = (c.re - c.im) * s;
        }
    }
}

impl SketchOperator {
    /// `Γ x`.
    pub fn apply_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let a = DenseMatrix::new(x.len(), 1, x.to_vec())?;
        Ok(self.apply(&a)?.into_data())
    }

    /// `Γ A` for dense `A` (m x n).
    pub fn apply(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        if a.rows() != self.in_dim {
            return Err(Error::ShapeMismatch(format!(
                "sketch expects {} rows, input has {}",
                self.in_dim,
                a.rows()
            )));
        }
        let (l, m, n) = (self.out_dim, self.in_dim, a.cols());
        Ok(match &self.kind {
            SketchKind::Gaussian(g) => g.matmul(a),
            SketchKind::Srtt { perm_out, signs, perm_in } => {
                // One transform per column of A, done on the rows of A^T.
                let at = a.transpose();
                let h = Hartley::new(m);
                let scale = (m as f64 / l as f64).sqrt();
                let mut out = DenseMatrix::zeros(n, l);
                let rows: Vec<Vec<f64>> = parallel::map_indexed(n, |j| {
                    let col = at.row(j);
                    let mut y: Vec<f64> = (0..m).map(|i| signs[i] * col[perm_in[i]]).collect();
                    let (mut buf, mut scratch) = (Vec::new(), Vec::new());
                    h.transform(&mut y, &mut buf, &mut scratch);
                    perm_out.iter().map(|&k| scale * y[k]).collect()
                });
                for (j, r) in rows.into_iter().enumerate() {
                    out.row_mut(j).copy_from_slice(&r);
                }
                out.transpose()
            }
            SketchKind::SparseSign { .. } => {
                let by_row = self.sparse_rows();
                let mut out = DenseMatrix::zeros(l, n);
                parallel::for_each_row(out.data_mut(), n, |r, orow| {
                    for &(k, v) in &by_row[r] {
                        axpy(v, a.row(k), orow);
                    }
                });
                out
            }
        })
    }

    /// Nonzeros of each output row as (input index, value), in input order.
    fn sparse_rows(&self) -> Vec<Vec<(usize, f64)>> {
        let SketchKind::SparseSign { zeta, supports, signs } = &self.kind else {
            unreachable!("sparse_rows on a non-sparse sketch")
        };
        let mut by_row = vec![Vec::new(); self.out_dim];
        for k in 0..self.in_dim {
            for t in 0..*zeta {
                by_row[supports[k * zeta + t]].push((k, signs[k * zeta + t]));
            }
        }
        by_row
    }

    /// `A Γ^T` for dense `A` (n x m).
    pub fn apply_right(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        if a.cols() != self.in_dim {
            return Err(Error::ShapeMismatch(format!(
                "right sketch expects {} columns, input has {}",
                self.in_dim,
                a.cols()
            )));
        }
        Ok(self.apply(&a.transpose())?.transpose())
    }

    /// Materialised l x m matrix.
    pub fn to_dense(&self) -> DenseMatrix {
        match &self.kind {
            SketchKind::Gaussian(g) => g.clone(),
            _ => self
                .apply(&DenseMatrix::identity(self.in_dim))
                .expect("identity matches input dimension"),
        }
    }

    /// Nonzero count of column j (sparse sign only).
    pub fn column_nnz(&self, j: usize) -> Option<usize> {
        match &self.kind {
            SketchKind::SparseSign { zeta, signs, .. } => {
                Some(signs[j * zeta..(j + 1) * zeta].iter().filter(|&&v| v != 0.0).count())
            }
            _ => None,
        }
    }
}

/// Row sketch `X = Γ A` of a dense or implicit operator.
pub fn sketch_rows<A: LinearOperator + ?Sized>(op: &SketchOperator, a: &A) -> Result<DenseMatrix> {
    if a.rows() != op.in_dim {
        return Err(Error::ShapeMismatch(format!(
            "sketch expects {} rows, operator has {}",
            op.in_dim,
            a.rows()
        )));
    }
    match a.as_dense() {
        Some(d) => op.apply(d),
        // Γ A = (A^T Γ^T)^T.
        None => Ok(a.apply_adjoint(&op.to_dense().transpose()).transpose()),
    }
}

/// Column sketch `Y = A Ω^T` of a dense or implicit operator.
pub fn sketch_cols<A: LinearOperator + ?Sized>(op: &SketchOperator, a: &A) -> Result<DenseMatrix> {
    if a.cols() != op.in_dim {
        return Err(Error::ShapeMismatch(format!(
            "sketch expects {} columns, operator has {}",
            op.in_dim,
            a.cols()
        )));
    }
    match a.as_dense() {
        Some(d) => op.apply_right(d),
        None => Ok(a.apply(&op.to_dense().transpose())),
    }
}
