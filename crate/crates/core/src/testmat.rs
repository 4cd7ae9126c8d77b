//! Synthetic test matrices and a CSV loader.

use std::path::Path;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::linalg::{householder_qr, qr_ortho, svd_thin, ThinSvd};
use crate::matrix::DenseMatrix;
use crate::operator::LinearOperator;
use crate::rng;

/// Parameters of `A = Σ s_i x_i y_i^T` with sparse nonnegative `x_i`, `y_i`.
#[derive(Clone, Debug)]
pub struct SnnParams {
    pub m: usize,
    pub n: usize,
    pub s: Vec<f64>,
    pub density: f64,
    pub seed: u64,
}

pub const DEFAULT_DENSITY: f64 = 0.025;

/// `s_i = a/i` for `i <= r1`, `1/i` afterwards (1-based), `r` values.
pub fn snn_weights(r: usize, a: f64, r1: usize) -> Vec<f64> {
    (1..=r)
        .map(|i| if i <= r1 { a / i as f64 } else { 1.0 / i as f64 })
        .collect()
}

impl SnnParams {
    /// Weights `2/i` for the first 100 terms and `1/i` after, rank `min(m, n)`.
    pub fn skeleton_profile(m: usize, n: usize, seed: u64) -> Self {
        Self { m, n, s: snn_weights(m.min(n), 2.0, 100), density: DEFAULT_DENSITY, seed }
    }

    /// Weights `a/i` for the first `r1` terms and `1/i` after, rank `min(m, n)`.
    pub fn with_head(m: usize, n: usize, a: f64, r1: usize, seed: u64) -> Self {
        Self { m, n, s: snn_weights(m.min(n), a, r1), density: DEFAULT_DENSITY, seed }
    }

    pub fn r(&self) -> usize {
        self.s.len()
    }
}

/// Sparse vector as parallel (index, value) lists.
#[derive(Clone, Debug, Default)]
pub struct SparseVec {
    pub idx: Vec<usize>,
    pub val: Vec<f64>,
}

impl SparseVec {
    fn dot_dense(&self, v: &[f64]) -> f64 {
        self.idx.iter().zip(&self.val).map(|(&i, &x)| x * v[i]).sum()
    }

    fn dot(&self, other: &SparseVec) -> f64 {
        let (mut a, mut b, mut acc) = (0, 0, 0.0);
        while a < self.idx.len() && b < other.idx.len() {
            match self.idx[a].cmp(&other.idx[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.val[a] * other.val[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut d = vec![0.0; len];
        for (&i, &x) in self.idx.iter().zip(&self.val) {
            d[i] = x;
        }
        d
    }
}

const MAX_RETRIES: usize = 100;

fn draw_sparse(len: usize, density: f64, index: usize, g: &mut rng::Rng) -> Result<SparseVec> {
    for _ in 0..=MAX_RETRIES {
        let mut v = SparseVec::default();
        for i in 0..len {
            if g.random::<f64>() < density {
                let x: f64 = g.random();
                if x > 0.0 {
                    v.idx.push(i);
                    v.val.push(x);
                }
            }
        }
        if !v.idx.is_empty() {
            return Ok(v);
        }
    }
    Err(Error::EmptyFactor { index, retries: MAX_RETRIES })
}

/// SNN matrix held as its sparse factors; multiplies in `O((m + n) r density)`.
#[derive(Clone, Debug)]
pub struct ImplicitSnnOperator {
    pub params: SnnParams,
    pub x: Vec<SparseVec>,
    pub y: Vec<SparseVec>,
}

pub fn gen_snn(params: SnnParams) -> Result<ImplicitSnnOperator> {
    let r = params.r();
    if r > params.m.min(params.n) {
        return Err(Error::BadShape(format!("SNN rank {r} exceeds min(m, n)")));
    }
    if !(params.density > 0.0 && params.density <= 1.0) {
        return Err(Error::BadShape(format!("density {} outside (0, 1]", params.density)));
    }
    if params.s.iter().any(|&v| !(v > 0.0 && v.is_finite()))
        || params.s.windows(2).any(|w| w[1] > w[0])
    {
        return Err(Error::BadShape("SNN weights must be positive and nonincreasing".into()));
    }
    let mut g = rng::from_seed(params.seed);
    let mut x = Vec::with_capacity(r);
    let mut y = Vec::with_capacity(r);
    for i in 0..r {
        x.push(draw_sparse(params.m, params.density, i, &mut g)?);
        y.push(draw_sparse(params.n, params.density, i, &mut g)?);
    }
    Ok(ImplicitSnnOperator { params, x, y })
}

/// Dense SNN matrix.
pub fn gen_snn_dense(params: SnnParams) -> Result<DenseMatrix> {
    Ok(gen_snn(params)?.densify())
}

impl ImplicitSnnOperator {
    pub fn densify(&self) -> DenseMatrix {
        let n = self.params.n;
        let mut a = DenseMatrix::zeros(self.params.m, n);
        for ((xi, yi), &s) in self.x.iter().zip(&self.y).zip(&self.params.s) {
            for (&p, &xv) in xi.idx.iter().zip(&xi.val) {
                let row = a.row_mut(p);
                for (&q, &yv) in yi.idx.iter().zip(&yi.val) {
                    row[q] += s * xv * yv;
                }
            }
        }
        a
    }

    /// `A v = Σ s_i x_i (y_i . v)`.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.params.n {
            return Err(Error::ShapeMismatch(format!("matvec needs length {}", self.params.n)));
        }
        let mut out = vec![0.0; self.params.m];
        for ((xi, yi), &s) in self.x.iter().zip(&self.y).zip(&self.params.s) {
            let c = s * yi.dot_dense(v);
            for (&p, &xv) in xi.idx.iter().zip(&xi.val) {
                out[p] += c * xv;
            }
        }
        Ok(out)
    }

    /// `A^T w = Σ s_i y_i (x_i . w)`.
    pub fn matvec_adjoint(&self, w: &[f64]) -> Result<Vec<f64>> {
        if w.len() != self.params.m {
            return Err(Error::ShapeMismatch(format!("adjoint matvec needs length {}", self.params.m)));
        }
        let mut out = vec![0.0; self.params.n];
        for ((xi, yi), &s) in self.x.iter().zip(&self.y).zip(&self.params.s) {
            let c = s * xi.dot_dense(w);
            for (&q, &yv) in yi.idx.iter().zip(&yi.val) {
                out[q] += c * yv;
            }
        }
        Ok(out)
    }

    /// `||A||_F` from the factor Gram matrices, without densifying.
    pub fn fro_norm(&self) -> f64 {
        let r = self.params.r();
        let s = &self.params.s;
        let mut acc = 0.0;
        for i in 0..r {
            for j in 0..r {
                acc += s[i] * s[j] * self.x[i].dot(&self.x[j]) * self.y[i].dot(&self.y[j]);
            }
        }
        acc.max(0.0).sqrt()
    }

    /// Exact thin SVD (rank r) through QR of the dense factor matrices.
    pub fn svd(&self) -> Result<ThinSvd> {
        let (m, n, r) = (self.params.m, self.params.n, self.params.r());
        let xd = DenseMatrix::from_fn(m, r, |i, j| self.x[j].to_dense(m)[i]);
        let yd = DenseMatrix::from_fn(n, r, |i, j| self.y[j].to_dense(n)[i]);
        let qx = householder_qr(&xd);
        let qy = householder_qr(&yd);
        let core = qx.r.scale_columns(&self.params.s).matmul_t(&qy.r);
        let s = svd_thin(&core)?;
        Ok(ThinSvd { u: qx.q.matmul(&s.u), sigma: s.sigma, v: qy.q.matmul(&s.v) })
    }
}

impl LinearOperator for ImplicitSnnOperator {
    fn rows(&self) -> usize {
        self.params.m
    }

    fn cols(&self) -> usize {
        self.params.n
    }

    fn apply(&self, b: &DenseMatrix) -> DenseMatrix {
        assert_eq!(b.rows(), self.params.n, "apply shape mismatch");
        let k = b.cols();
        let mut out = DenseMatrix::zeros(self.params.m, k);
        for ((xi, yi), &s) in self.x.iter().zip(&self.y).zip(&self.params.s) {
            let mut c = vec![0.0; k];
            for (&q, &yv) in yi.idx.iter().zip(&yi.val) {
                crate::matrix::axpy(s * yv, b.row(q), &mut c);
            }
            for (&p, &xv) in xi.idx.iter().zip(&xi.val) {
                crate::matrix::axpy(xv, &c, out.row_mut(p));
            }
        }
        out
    }

    fn apply_adjoint(&self, b: &DenseMatrix) -> DenseMatrix {
        assert_eq!(b.rows(), self.params.m, "adjoint shape mismatch");
        let k = b.cols();
        let mut out = DenseMatrix::zeros(self.params.n, k);
        for ((xi, yi), &s) in self.x.iter().zip(&self.y).zip(&self.params.s) {
            let mut c = vec![0.0; k];
            for (&p, &xv) in xi.idx.iter().zip(&xi.val) {
                crate::matrix::axpy(s * xv, b.row(p), &mut c);
            }
            for (&q, &yv) in yi.idx.iter().zip(&yi.val) {
                crate::matrix::axpy(yv, &c, out.row_mut(q));
            }
        }
        out
    }
}

/// Shapes of synthetic singular-value profiles.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumProfile {
    /// 1 up to `r1`, then `1/sqrt(i - r1 + 1)`.
    SlowDecay { r1: usize },
    /// 1 up to `r1`, then `max(0.99^(i - r1), 1e-3)`.
    FastDecay { r1: usize },
    /// `sigma1` for the first k values, `sigma_k1` after.
    Step { k: usize, sigma1: f64, sigma_k1: f64 },
    Explicit(Vec<f64>),
}

impl SpectrumProfile {
    /// Step spectrum with tail level 1 and head level `gap`.
    pub fn step(k: usize, gap: f64) -> Self {
        Self::Step { k, sigma1: gap, sigma_k1: 1.0 }
    }

    /// The first `r` values (1-based i in the formulas).
    pub fn values(&self, r: usize) -> Vec<f64> {
        match self {
            Self::SlowDecay { r1 } => (1..=r)
                .map(|i| if i <= *r1 { 1.0 } else { 1.0 / ((i - r1 + 1) as f64).sqrt() })
                .collect(),
            Self::FastDecay { r1 } => (1..=r)
                .map(|i| if i <= *r1 { 1.0 } else { 0.99f64.powi((i - r1) as i32).max(1e-3) })
                .collect(),
            Self::Step { k, sigma1, sigma_k1 } => {
                (0..r).map(|i| if i < *k { *sigma1 } else { *sigma_k1 }).collect()
            }
            Self::Explicit(v) => v[..r.min(v.len())].to_vec(),
        }
    }
}

/// Size `(1 + beta) k` of the step-spectrum matrices.
pub fn step_size(k: usize, beta: usize) -> usize {
    (1 + beta) * k
}

/// `A = U diag(sigma) V^T` with its exact factors.
#[derive(Clone, Debug)]
pub struct SpectrumMatrix {
    pub a: DenseMatrix,
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

/// Random dense matrix with a prescribed spectrum: `U = ortho(G_m)`,
/// `V = ortho(G_n)` for Gaussian `G`. Uses `min(m, n)` profile values
/// (all of them for an explicit profile).
pub fn gen_gaussian_spectrum(m: usize, n: usize, profile: &SpectrumProfile, seed: u64) -> Result<SpectrumMatrix> {
    let r = match profile {
        SpectrumProfile::Explicit(v) => v.len(),
        _ => m.min(n),
    };
    if r > m.min(n) || r == 0 {
        return Err(Error::BadShape(format!("profile length {r} invalid for {m}x{n}")));
    }
    let sigma = profile.values(r);
    if sigma.iter().any(|&s| !(s > 0.0)) || sigma.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::BadShape("spectrum must be positive and nonincreasing".into()));
    }
    let mut g = rng::from_seed(seed);
    let u = qr_ortho(&rng::gaussian_matrix(m, r, 1.0, &mut g))?;
    let v = qr_ortho(&rng::gaussian_matrix(n, r, 1.0, &mut g))?;
    let a = u.scale_columns(&sigma).matmul_t(&v);
    Ok(SpectrumMatrix { a, u, sigma, v })
}

/// Reads a rectangular numeric CSV. A first row with no numeric cell is taken
/// as a header. Error locations are 1-based file rows and columns.
pub fn load_csv(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if line == 0 && rec.iter().all(|c| parse_cell(c).is_none()) {
            continue;
        }
        let width = *cols.get_or_insert(rec.len());
        if rec.len() != width {
            return Err(Error::RaggedRows { row: line + 1, expected: width, found: rec.len() });
        }
        for (j, cell) in rec.iter().enumerate() {
            let v = parse_cell(cell).ok_or_else(|| Error::NonNumericCell {
                row: line + 1,
                col: j + 1,
                text: cell.to_owned(),
            })?;
            data.push(v);
        }
        rows += 1;
    }
    DenseMatrix::new(rows, cols.unwrap_or(0), data)
}

fn parse_cell(c: &str) -> Option<f64> {
    c.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Writes `m` as CSV with 17 significant digits (lossless for f64).
pub fn write_csv(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::WriterBuilder::new()
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::Io { path: path.to_owned(), source },
            other => Error::Io { path: path.to_owned(), source: std::io::Error::other(format!("{other:?}")) },
        })?;
    for i in 0..m.rows() {
        w.write_record(m.row(i).iter().map(|v| format!("{v:.16e}")))?;
    }
    w.flush().map_err(|source| Error::Io { path: path.to_owned(), source })?;
    Ok(())
}
