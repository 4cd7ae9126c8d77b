use super::qr::householder_qr;
use super::RANK_TOL;
use crate::error::{Error, Result};
use crate::matrix::{dot, DenseMatrix};

/// Thin SVD `M = U diag(sigma) V^T`, sigma nonincreasing.
#[derive(Clone, Debug)]
pub struct ThinSvd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl ThinSvd {
    /// Number of singular values above `1e-12 * sigma[0]`.
    pub fn rank(&self) -> usize {
        let tol = RANK_TOL * self.sigma.first().copied().unwrap_or(0.0);
        self.sigma.iter().filter(|&&s| s > tol).count()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.u.scale_columns(&self.sigma).matmul_t(&self.v)
    }
}

const MAX_SWEEPS: usize = 80;

/// Thin SVD by QR preconditioning followed by one-sided (Hestenes) Jacobi on R.
///
/// U is taken from a QR of `R V` rather than by normalising columns, so it
/// stays orthonormal when singular values underflow or vanish.
pub fn svd_thin(m: &DenseMatrix) -> Result<ThinSvd> {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd_thin(&m.transpose())?;
        return Ok(ThinSvd { u: t.v, sigma: t.sigma, v: t.u });
    }
    if cols == 0 {
        return Ok(ThinSvd {
            u: DenseMatrix::zeros(rows, 0),
            sigma: Vec::new(),
            v: DenseMatrix::zeros(0, 0),
        });
    }
    let qr = householder_qr(m);
    let n = cols;
    // Rows of `w` are the columns of R V; rows of `vt` are the columns of V.
    let mut w = qr.r.transpose();
    let mut vt = DenseMatrix::identity(n);
    jacobi(&mut w, Some(&mut vt))?;

    let mut sigma: Vec<f64> = (0..n).map(|j| crate::matrix::norm2(w.row(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]).then(a.cmp(&b)));
    sigma = order.iter().map(|&j| sigma[j]).collect();
    let w = w.select_rows(&order);
    let v = vt.select_rows(&order).transpose();

    // W = U_R diag(sigma) with orthogonal columns; its QR has Q = U_R.
    let ur = householder_qr(&w.transpose()).q;
    let u = qr.q.matmul(&ur);
    Ok(ThinSvd { u, sigma, v })
}

fn jacobi(w: &mut DenseMatrix, mut vt: Option<&mut DenseMatrix>) -> Result<()> {
    let n = w.rows();
    // Below this the computed inner product is rounding noise.
    let tol = 4.0 * f64::EPSILON * (n.max(1) as f64).sqrt();
    for _ in 0..MAX_SWEEPS {
        // Squared row norms, refreshed each sweep and updated per rotation.
        let mut nrm: Vec<f64> = (0..n).map(|j| dot(w.row(j), w.row(j))).collect();
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta) = (nrm[p], nrm[q]);
                // Subnormal squared norms carry no usable digits; such rows are zero.
                if alpha < f64::MIN_POSITIVE || beta < f64::MIN_POSITIVE {
                    continue;
                }
                let (wp, wq) = two_rows(w, p, q);
                let gamma = dot(wp, wq);
                if gamma == 0.0 || gamma.abs() <= tol * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(wp, wq, c, s);
                nrm[p] = (alpha - t * gamma).max(0.0);
                nrm[q] = beta + t * gamma;
                if let Some(vt) = vt.as_deref_mut() {
                    let (vp, vq) = two_rows(vt, p, q);
                    rotate(vp, vq, c, s);
                }
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS })
}

#[inline]
fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b);
        *a = c * xa - s * yb;
        *b = s * xa + c * yb;
    }
}

fn two_rows(m: &mut DenseMatrix, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(p < q);
    let n = m.cols();
    let (lo, hi) = m.data_mut().split_at_mut(q * n);
    (&mut lo[p * n..(p + 1) * n], &mut hi[..n])
}

/// Singular values only, nonincreasing. Skips accumulating V and U.
pub fn singular_values(m: &DenseMatrix) -> Result<Vec<f64>> {
    if m.rows() < m.cols() {
        return singular_values(&m.transpose());
    }
    if m.cols() == 0 {
        return Ok(Vec::new());
    }
    let mut w = householder_qr(m).r.transpose();
    jacobi(&mut w, None)?;
    let mut sigma: Vec<f64> = (0..w.rows()).map(|j| crate::matrix::norm2(w.row(j))).collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    Ok(sigma)
}

/// Largest singular value: the top eigenvalue of the smaller Gram matrix,
/// found by tridiagonalisation and bisection.
pub fn spectral_norm(m: &DenseMatrix) -> Result<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    let scale = m.max_abs();
    if scale == 0.0 || !scale.is_finite() {
        return Ok(scale);
    }
    // Scaling keeps the Gram entries away from overflow and underflow.
    let ms = m.scaled(1.0 / scale);
    let gram = if ms.rows() >= ms.cols() { ms.t_matmul(&ms) } else { ms.matmul_t(&ms) };
    let (d, e) = super::symeig::tridiagonalize(&gram);
    Ok(super::symeig::largest_eigenvalue(&d, &e).max(0.0).sqrt() * scale)
}
