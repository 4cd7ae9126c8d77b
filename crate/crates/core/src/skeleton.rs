//! Skeleton selection (sketch then pivot, DEIM, leverage sampling, streaming)
//! and the ID / CUR builders.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::linalg::cpqr::cpqr_pivots;
use crate::linalg::lu::lupp_pivots;
use crate::linalg::solve::solve_square;
use crate::linalg::{householder_qr, spectral_norm, svd_thin, RANK_TOL};
use crate::matrix::{gemm_acc, DenseMatrix};
use crate::operator::LinearOperator;
use crate::rangefinder::randomized_svd;
use crate::sketch::{self, EmbeddingKind};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SkeletonMethod {
    RandLupp,
    RandLupp1piter,
    RandCpqr,
    RandCpqr1piter,
    RsvdDeim,
    RsvdLeverage,
    Streaming,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pivot {
    Lupp,
    Cpqr,
}

#[derive(Clone, Debug)]
pub struct SkeletonResult {
    /// Selected columns `J_s`, in pivot order.
    pub columns: Vec<usize>,
    /// Selected rows `I_s`, in pivot order.
    pub rows: Option<Vec<usize>>,
    pub method: SkeletonMethod,
    /// `sqrt(1 + ||X_1^{-1} X_2||^2)` for the row approximator that was pivoted.
    pub eta_column: Option<f64>,
    /// The same factor for the row selection, pivoted on C.
    pub eta_row: Option<f64>,
    /// The row approximator X (l x n) the columns were pivoted on.
    pub sketch: Option<DenseMatrix>,
    /// Requested skeleton size; `columns.len()` is smaller when pivoting hit the rank.
    pub requested: usize,
    pub seed: u64,
}

fn pivots_of_rows(x: &DenseMatrix, l: usize, pivot: Pivot) -> Vec<usize> {
    match pivot {
        Pivot::Lupp => lupp_pivots(&x.transpose(), l),
        Pivot::Cpqr => cpqr_pivots(x, l),
    }
}

fn pivots_of_columns(c: &DenseMatrix, l: usize, pivot: Pivot) -> Vec<usize> {
    match pivot {
        Pivot::Lupp => lupp_pivots(c, l),
        Pivot::Cpqr => cpqr_pivots(&c.transpose(), l),
    }
}

/// η for rows: pivoting C's rows is pivoting the columns of C^T.
fn eta_if_square(x: &DenseMatrix, idx: &[usize]) -> Option<f64> {
    if idx.len() == x.rows() {
        posterior_eta(x, idx).ok()
    } else {
        None
    }
}

fn check_l<A: LinearOperator + ?Sized>(a: &A, l: usize) -> Result<()> {
    if l == 0 || l > a.rows().min(a.cols()) {
        return Err(Error::BadShape(format!(
            "skeleton size l={l} must be in 1..=min({}, {})",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// Row approximator `X = Γ (A A^T)^q A` with plain (unorthogonalised) iteration.
pub fn row_sketch<A: LinearOperator + ?Sized>(
    a: &A,
    l: usize,
    q: usize,
    seed: u64,
    kind: EmbeddingKind,
) -> Result<DenseMatrix> {
    let gamma = sketch::make(kind, l, a.rows(), seed)?;
    let mut x = sketch::sketch_rows(&gamma, a)?;
    for _ in 0..q {
        // X A^T A = (A^T (A X^T))^T.
        x = a.apply_adjoint(&a.apply(&x.transpose())).transpose();
    }
    Ok(x)
}

/// Sketch-then-pivot selection with a configurable embedding and pivoting rule.
pub fn select_columns<A: LinearOperator + ?Sized>(
    a: &A,
    l: usize,
    q: usize,
    seed: u64,
    pivot: Pivot,
    kind: EmbeddingKind,
) -> Result<SkeletonResult> {
    check_l(a, l)?;
    let x = row_sketch(a, l, q, seed, kind)?;
    let columns = pivots_of_rows(&x, l, pivot);
    let c = a.columns(&columns);
    let rows = pivots_of_columns(&c, columns.len(), pivot);
    let method = match (pivot, q) {
        (Pivot::Lupp, 0) => SkeletonMethod::RandLupp,
        (Pivot::Lupp, _) => SkeletonMethod::RandLupp1piter,
        (Pivot::Cpqr, 0) => SkeletonMethod::RandCpqr,
        (Pivot::Cpqr, _) => SkeletonMethod::RandCpqr1piter,
    };
    Ok(SkeletonResult {
        eta_column: eta_if_square(&x, &columns),
        eta_row: eta_if_square(&c.transpose(), &rows),
        columns,
        rows: Some(rows),
        method,
        sketch: Some(x),
        requested: l,
        seed,
    })
}

/// Rand-LUPP: LUPP on `X^T` for `X = Γ (A A^T)^q A`, Gaussian Γ.
pub fn select_columns_lupp<A: LinearOperator + ?Sized>(a: &A, l: usize, q: usize, seed: u64) -> Result<SkeletonResult> {
    select_columns(a, l, q, seed, Pivot::Lupp, EmbeddingKind::Gaussian)
}

/// Rand-CPQR: CPQR on `X = Γ (A A^T)^q A`, Gaussian Γ.
pub fn select_columns_cpqr<A: LinearOperator + ?Sized>(a: &A, l: usize, q: usize, seed: u64) -> Result<SkeletonResult> {
    select_columns(a, l, q, seed, Pivot::Cpqr, EmbeddingKind::Gaussian)
}

/// RSVD-DEIM: LUPP on the right singular vectors of a rank-l randomized SVD.
pub fn select_deim<A: LinearOperator + ?Sized>(a: &A, l: usize, q: usize, seed: u64) -> Result<SkeletonResult> {
    check_l(a, l)?;
    let s = randomized_svd(a, l, q, seed, EmbeddingKind::Gaussian)?;
    let columns = lupp_pivots(&s.v_hat, l);
    let c = a.columns(&columns);
    let rows = lupp_pivots(&c, columns.len());
    let x = s.v_hat.transpose();
    Ok(SkeletonResult {
        eta_column: eta_if_square(&x, &columns),
        eta_row: eta_if_square(&c.transpose(), &rows),
        columns,
        rows: Some(rows),
        method: SkeletonMethod::RsvdDeim,
        sketch: Some(x),
        requested: l,
        seed,
    })
}

/// Draws up to `count` distinct indices, each draw proportional to the
/// remaining weights. Stops early once the remaining mass is negligible.
fn sample_without_replacement(weights: &[f64], count: usize, g: &mut rng::Rng) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let mut w = weights.to_vec();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mass: f64 = w.iter().sum();
        if mass <= 1e-15 * total {
            break;
        }
        let target = g.random::<f64>() * mass;
        let mut acc = 0.0;
        let mut pick = None;
        for (j, &x) in w.iter().enumerate() {
            if x > 0.0 {
                acc += x;
                pick = Some(j);
                if acc > target {
                    break;
                }
            }
        }
        let j = pick.expect("positive mass has a positive weight");
        w[j] = 0.0;
        out.push(j);
    }
    out
}

fn leverage_scores(basis: &DenseMatrix) -> Vec<f64> {
    let k = basis.cols() as f64;
    (0..basis.rows())
        .map(|i| basis.row(i).iter().map(|v| v * v).sum::<f64>() / k)
        .collect()
}

/// RSVD-LS: sample l columns (and rows) by approximate rank-k leverage scores.
pub fn select_leverage<A: LinearOperator + ?Sized>(a: &A, k: usize, l: usize, seed: u64) -> Result<SkeletonResult> {
    check_l(a, l)?;
    if k == 0 || k > l {
        return Err(Error::BadShape(format!("leverage sampling needs 1 <= k <= l, got k={k}, l={l}")));
    }
    let s = randomized_svd(a, k, 0, seed, EmbeddingKind::Gaussian)?;
    // Directions with negligible σ̂ carry no leverage.
    let live: Vec<f64> = s.sigma_hat.iter().map(|&x| if x > RANK_TOL * s.sigma_hat[0] { 1.0 } else { 0.0 }).collect();
    let col_scores = leverage_scores(&s.v_hat.scale_columns(&live));
    let row_scores = leverage_scores(&s.u_hat.scale_columns(&live));
    if col_scores.iter().all(|&p| p < 1e-15) || row_scores.iter().all(|&p| p < 1e-15) {
        return Err(Error::DegenerateDistribution);
    }
    let mut g = rng::substream(seed, 1);
    let columns = sample_without_replacement(&col_scores, l, &mut g);
    let rows = sample_without_replacement(&row_scores, l, &mut g);
    Ok(SkeletonResult {
        columns,
        rows: Some(rows),
        method: SkeletonMethod::RsvdLeverage,
        eta_column: None,
        eta_row: None,
        sketch: None,
        requested: l,
        seed,
    })
}

/// Output of a one-pass selection: the skeletons and both sketches.
#[derive(Clone, Debug)]
pub struct StreamingSkeleton {
    pub result: SkeletonResult,
    /// Row sketch `Γ A` (l x n).
    pub x: DenseMatrix,
    /// Column sketch `A Ω^T` (m x l).
    pub y: DenseMatrix,
}

impl StreamingSkeleton {
    /// Estimate of `C^† A` as `X_1^{-1} X`, without revisiting A.
    pub fn column_id_estimate(&self) -> Result<DenseMatrix> {
        let x1 = self.x.select_columns(&self.result.columns);
        if x1.rows() != x1.cols() {
            return Err(Error::SingularPivotBlock);
        }
        solve_square(&x1, &self.x).ok_or(Error::SingularPivotBlock)
    }

    /// Estimate of `A R^†` as `Y Y_1^{-1}`, without revisiting A.
    pub fn row_id_estimate(&self) -> Result<DenseMatrix> {
        let rows = self.result.rows.as_deref().unwrap_or(&[]);
        let y1 = self.y.select_rows(rows);
        if y1.rows() != y1.cols() {
            return Err(Error::SingularPivotBlock);
        }
        // Y Y_1^{-1} = (Y_1^{-T} Y^T)^T.
        Ok(solve_square(&y1.transpose(), &self.y.transpose())
            .ok_or(Error::SingularPivotBlock)?
            .transpose())
    }
}

/// One pass over consecutive column blocks of an m x n matrix: accumulates
/// `X = Γ A` and `Y = A Ω^T` block by block, then pivots X for the columns
/// and Y for the rows. A itself is never stored.
pub fn select_streaming<I>(
    blocks: I,
    m: usize,
    n: usize,
    l: usize,
    seed: u64,
    pivot: Pivot,
) -> Result<StreamingSkeleton>
where
    I: IntoIterator<Item = DenseMatrix>,
{
    if l == 0 || l > m.min(n) {
        return Err(Error::BadShape(format!("skeleton size l={l} must be in 1..=min({m}, {n})")));
    }
    // Same Γ as select_columns with this seed; Ω on its own stream.
    let gamma = sketch::make_gaussian(l, m, seed)?;
    let omega_t = sketch::make_gaussian(l, n, rng::derive_seed(seed, 1))?.to_dense().transpose();
    let mut x = DenseMatrix::zeros(l, n);
    let mut y = DenseMatrix::zeros(m, l);
    let mut seen = 0;
    for block in blocks {
        let w = block.cols();
        if block.rows() != m || seen + w > n {
            return Err(Error::ShapeMismatch(format!(
                "block {}x{} does not fit an {m}x{n} stream at column {seen}",
                block.rows(),
                w
            )));
        }
        let xb = gamma.apply(&block)?;
        for i in 0..l {
            x.row_mut(i)[seen..seen + w].copy_from_slice(xb.row(i));
        }
        gemm_acc(&mut y, &block, &omega_t.row_range(seen, seen + w));
        seen += w;
    }
    if seen < n {
        return Err(Error::StreamExhausted { seen, expected: n });
    }
    let columns = pivots_of_rows(&x, l, pivot);
    let rows = pivots_of_columns(&y, l, pivot);
    let result = SkeletonResult {
        eta_column: eta_if_square(&x, &columns),
        eta_row: eta_if_square(&y.transpose(), &rows),
        columns,
        rows: Some(rows),
        method: SkeletonMethod::Streaming,
        sketch: Some(x.clone()),
        requested: l,
        seed,
    };
    Ok(StreamingSkeleton { result, x, y })
}

/// `sqrt(1 + ||X_1^{-1} X_2||_2^2)` with `X_1 = X(:, J)` square and `X_2` the
/// remaining columns. Bounds `||A - C C^† A|| / ||A - A X^† X||` for `C = A(:, J)`.
pub fn posterior_eta(x: &DenseMatrix, columns: &[usize]) -> Result<f64> {
    let (l, n) = x.shape();
    if columns.len() != l {
        return Err(Error::ShapeMismatch(format!("need {l} pivot columns, got {}", columns.len())));
    }
    let mut in_j = vec![false; n];
    for &j in columns {
        if j >= n || std::mem::replace(&mut in_j[j], true) {
            return Err(Error::ShapeMismatch(format!("bad or repeated column index {j}")));
        }
    }
    let rest: Vec<usize> = (0..n).filter(|&j| !in_j[j]).collect();
    if rest.is_empty() {
        return Ok(1.0);
    }
    let x1 = x.select_columns(columns);
    let x2 = x.select_columns(&rest);
    let z = solve_square(&x1, &x2).ok_or(Error::SingularPivotBlock)?;
    let s = spectral_norm(&z)?;
    Ok((1.0 + s * s).sqrt())
}

/// Orthonormal basis Q of `range(M)` and P with `M^† = P Q^T`. Tall M must
/// have full column rank; wide M (more skeletons than ambient rows) gets a
/// truncated SVD basis of its range.
fn skeleton_basis(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    if m.rows() >= m.cols() {
        let qr = householder_qr(m);
        let tol = RANK_TOL * m.fro_norm();
        if (0..qr.r.rows()).any(|i| qr.r.get(i, i) <= tol) {
            return Err(Error::SingularSkeleton);
        }
        let p = crate::linalg::solve::upper_solve(&qr.r, &DenseMatrix::identity(m.cols()));
        return Ok((qr.q, p));
    }
    let s = svd_thin(m)?;
    let rank = s.rank();
    if rank == 0 {
        return Err(Error::SingularSkeleton);
    }
    let idx: Vec<usize> = (0..rank).collect();
    let inv: Vec<f64> = s.sigma[..rank].iter().map(|x| 1.0 / x).collect();
    Ok((s.u.select_columns(&idx), s.v.select_columns(&idx).scale_columns(&inv)))
}

fn check_indices(idx: &[usize], bound: usize) -> Result<()> {
    let mut seen = vec![false; bound];
    for &i in idx {
        if i >= bound || std::mem::replace(&mut seen[i], true) {
            return Err(Error::ShapeMismatch(format!("bad or repeated skeleton index {i}")));
        }
    }
    if idx.is_empty() || idx.len() > bound {
        return Err(Error::SingularSkeleton);
    }
    Ok(())
}

/// `A ≈ C (C^† A)`.
#[derive(Clone, Debug)]
pub struct ColumnId {
    pub columns: Vec<usize>,
    pub c: DenseMatrix,
    /// `C^† A` (l x n); equals the identity on the skeleton columns.
    pub coeffs: DenseMatrix,
}

impl ColumnId {
    pub fn reconstruct(&self) -> DenseMatrix {
        self.c.matmul(&self.coeffs)
    }
}

/// `A ≈ (A R^†) R`.
#[derive(Clone, Debug)]
pub struct RowId {
    pub rows: Vec<usize>,
    pub r: DenseMatrix,
    /// `A R^†` (m x l); equals the identity on the skeleton rows.
    pub coeffs: DenseMatrix,
}

impl RowId {
    pub fn reconstruct(&self) -> DenseMatrix {
        self.coeffs.matmul(&self.r)
    }
}

/// `A ≈ (C S^{-1}) S (C^† A)` with `S = A(I, J)`.
#[derive(Clone, Debug)]
pub struct TwoSidedId {
    pub rows: Vec<usize>,
    pub columns: Vec<usize>,
    /// `C S^{-1}` (m x l), by a solve rather than an inverse.
    pub left: DenseMatrix,
    pub s: DenseMatrix,
    /// `C^† A` (l x n).
    pub right: DenseMatrix,
}

impl TwoSidedId {
    pub fn reconstruct(&self) -> DenseMatrix {
        self.left.matmul(&self.s).matmul(&self.right)
    }
}

/// `C^† A` through an orthonormal basis of C.
fn pinv_apply(c: &DenseMatrix, a: &DenseMatrix) -> Result<DenseMatrix> {
    let (q, p) = skeleton_basis(c)?;
    Ok(p.matmul(&q.t_matmul(a)))
}

pub fn build_column_id(a: &DenseMatrix, columns: &[usize]) -> Result<ColumnId> {
    check_indices(columns, a.cols())?;
    let c = a.select_columns(columns);
    let coeffs = pinv_apply(&c, a)?;
    Ok(ColumnId { columns: columns.to_vec(), c, coeffs })
}

pub fn build_row_id(a: &DenseMatrix, rows: &[usize]) -> Result<RowId> {
    check_indices(rows, a.rows())?;
    let r = a.select_rows(rows);
    let coeffs = pinv_apply(&r.transpose(), &a.transpose())?.transpose();
    Ok(RowId { rows: rows.to_vec(), r, coeffs })
}

pub fn build_two_sided_id(a: &DenseMatrix, rows: &[usize], columns: &[usize]) -> Result<TwoSidedId> {
    check_indices(rows, a.rows())?;
    check_indices(columns, a.cols())?;
    if rows.len() != columns.len() {
        return Err(Error::ShapeMismatch("two-sided ID needs |I| = |J|".into()));
    }
    let c = a.select_columns(columns);
    let s = c.select_rows(rows);
    // C S^{-1} = (S^{-T} C^T)^T.
    let left = solve_square(&s.transpose(), &c.transpose())
        .ok_or(Error::SingularSkeleton)?
        .transpose();
    let right = pinv_apply(&c, a)?;
    Ok(TwoSidedId { rows: rows.to_vec(), columns: columns.to_vec(), left, s, right })
}

/// Stable CUR `Q_C (Q_C^T A Q_R) Q_R^T`, kept in factored form.
#[derive(Clone, Debug)]
pub struct CurFactors {
    pub rows: Vec<usize>,
    pub columns: Vec<usize>,
    pub c: DenseMatrix,
    pub r: DenseMatrix,
    /// `C^† A R^†`, so that `C U_mid R` is the CUR approximation.
    pub u_mid: DenseMatrix,
    pub q_c: DenseMatrix,
    pub q_r: DenseMatrix,
    /// `Q_C^T A Q_R`.
    pub core: DenseMatrix,
}

impl CurFactors {
    pub fn reconstruct(&self) -> DenseMatrix {
        self.q_c.matmul(&self.core).matmul_t(&self.q_r)
    }
}

/// CUR through orthonormal bases of C and R^T; works on implicit operators.
pub fn build_cur_stable<A: LinearOperator + ?Sized>(a: &A, rows: &[usize], columns: &[usize]) -> Result<CurFactors> {
    check_indices(rows, a.rows())?;
    check_indices(columns, a.cols())?;
    let c = a.columns(columns);
    let r = a.rows_of(rows);
    let (q_c, p_c) = skeleton_basis(&c)?;
    let (q_r, p_r) = skeleton_basis(&r.transpose())?;
    let core = q_c.t_matmul(&a.apply(&q_r));
    // C^† A R^† = P_C core P_R^T.
    let u_mid = p_c.matmul(&core).matmul_t(&p_r);
    Ok(CurFactors { rows: rows.to_vec(), columns: columns.to_vec(), c, r, u_mid, q_c, q_r, core })
}

/// `C S^{-1} R`. Unstable when S is ill conditioned; only for callers that
/// accept that trade to avoid a further pass over A.
pub fn build_cur_unstable(a: &DenseMatrix, rows: &[usize], columns: &[usize]) -> Result<DenseMatrix> {
    let c = a.select_columns(columns);
    let s = c.select_rows(rows);
    let r = a.select_rows(rows);
    let sr = solve_square(&s, &r).ok_or(Error::SingularSkeleton)?;
    Ok(c.matmul(&sr))
}
