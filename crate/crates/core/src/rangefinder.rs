//! Randomized range finding and the randomized SVD.

use crate::error::{Error, Result};
use crate::linalg::{householder_qr, qr_ortho, spectral_norm, svd_thin};
use crate::matrix::DenseMatrix;
use crate::operator::LinearOperator;
use crate::sketch::{self, EmbeddingKind, SketchOperator};

/// Rank-l approximation `U_hat diag(sigma_hat) V_hat^T` with its provenance.
#[derive(Clone, Debug)]
pub struct LowRankSvd {
    pub u_hat: DenseMatrix,
    pub sigma_hat: Vec<f64>,
    pub v_hat: DenseMatrix,
    pub l: usize,
    pub q: usize,
    pub seed: u64,
}

impl LowRankSvd {
    pub fn reconstruct(&self) -> DenseMatrix {
        self.u_hat.scale_columns(&self.sigma_hat).matmul_t(&self.v_hat)
    }

    /// The leading `k` triplets.
    pub fn truncate(&self, k: usize) -> LowRankSvd {
        let idx: Vec<usize> = (0..k).collect();
        LowRankSvd {
            u_hat: self.u_hat.select_columns(&idx),
            sigma_hat: self.sigma_hat[..k].to_vec(),
            v_hat: self.v_hat.select_columns(&idx),
            ..self.clone()
        }
    }
}

/// `(A A^T)^q A Ω^T` by plain repeated multiplication. Loses the trailing
/// directions to rounding for large q on ill-conditioned A.
pub fn power_iter_plain<A: LinearOperator + ?Sized>(
    a: &A,
    omega: &SketchOperator,
    q: usize,
) -> Result<DenseMatrix> {
    let mut y = sketch::sketch_cols(omega, a)?;
    for _ in 0..q {
        y = a.apply(&a.apply_adjoint(&y));
    }
    Ok(y)
}

/// Orthonormal basis of `range((A A^T)^q A Ω^T)`, re-orthonormalising after
/// every half iteration.
pub fn power_iter_stable<A: LinearOperator + ?Sized>(
    a: &A,
    omega: &SketchOperator,
    q: usize,
) -> Result<DenseMatrix> {
    let mut qx = qr_ortho(&sketch::sketch_cols(omega, a)?)?;
    for _ in 0..q {
        let w = qr_ortho(&a.apply_adjoint(&qx))?;
        qx = qr_ortho(&a.apply(&w))?;
    }
    Ok(qx)
}

/// Randomized SVD with `q` stable power iterations and sketch size `l`.
pub fn randomized_svd<A: LinearOperator + ?Sized>(
    a: &A,
    l: usize,
    q: usize,
    seed: u64,
    kind: EmbeddingKind,
) -> Result<LowRankSvd> {
    let (m, n) = (a.rows(), a.cols());
    if l == 0 || l > m.min(n) {
        return Err(Error::BadShape(format!("randomized_svd needs 1 <= l <= min(m, n), got l={l} for {m}x{n}")));
    }
    let omega = sketch::make(kind, l, n, seed)?;
    // Householder bases contain the range even when the sketch is rank
    // deficient (e.g. rank(A) < l), so exact-rank inputs are captured.
    let basis = |y: &DenseMatrix| householder_qr(y).q;
    let mut qx = basis(&sketch::sketch_cols(&omega, a)?);
    for _ in 0..q {
        let w = basis(&a.apply_adjoint(&qx));
        qx = basis(&a.apply(&w));
    }
    // B = A^T Q_X = P Σ W^T, so Q_X Q_X^T A = (Q_X W) Σ P^T.
    let b = a.apply_adjoint(&qx);
    let s = svd_thin(&b)?;
    Ok(LowRankSvd { u_hat: qx.matmul(&s.v), sigma_hat: s.sigma, v_hat: s.u, l, q, seed })
}

/// Frobenius and spectral norms of `A (I - X^† X)`, via an orthonormal basis
/// of the row space of X.
pub fn rangefinder_error(a: &DenseMatrix, x: &DenseMatrix) -> Result<(f64, f64)> {
    if x.cols() != a.cols() {
        return Err(Error::ShapeMismatch(format!(
            "row approximator has {} columns, matrix has {}",
            x.cols(),
            a.cols()
        )));
    }
    if x.rows() > x.cols() {
        return Err(Error::RankDeficient { rank: x.cols(), needed: x.rows() });
    }
    let qx = qr_ortho(&x.transpose())?;
    let res = a.sub(&a.matmul(&qx).matmul_t(&qx));
    Ok((res.fro_norm(), spectral_norm(&res)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sketch::srtt_from_parts;

    fn identity_sketch(n: usize) -> SketchOperator {
        srtt_from_parts((0..n).collect(), vec![1.0; n], (0..n).collect(), 0).unwrap()
    }

    #[test]
    fn plain_iteration_on_diagonal() {
        let a = DenseMatrix::from_diag(&[2.0, 1.0]);
        // An SRTT with every row kept is orthogonal; undo it to test against Ω = I.
        let omega = identity_sketch(2);
        let t = omega.to_dense();
        let y = power_iter_plain(&a, &omega, 2).unwrap().matmul(&t);
        assert!((y.get(0, 0) - 32.0).abs() < 1e-12);
        assert!((y.get(1, 1) - 1.0).abs() < 1e-12);
        assert!(y.get(0, 1).abs() < 1e-12 && y.get(1, 0).abs() < 1e-12);
    }

    #[test]
    fn exact_rank_is_captured() {
        let mut g = crate::rng::from_seed(5);
        let b = crate::rng::gaussian_matrix(40, 5, 1.0, &mut g);
        let c = crate::rng::gaussian_matrix(5, 30, 1.0, &mut g);
        let a = b.matmul(&c);
        let s = randomized_svd(&a, 5, 0, 1, EmbeddingKind::Gaussian).unwrap();
        assert!(s.reconstruct().sub(&a).fro_norm() < 1e-9 * a.fro_norm());
    }

    #[test]
    fn rangefinder_error_eckart_young() {
        let sm = crate::testmat::gen_gaussian_spectrum(
            30,
            20,
            &crate::testmat::SpectrumProfile::Explicit((1..=20).map(|i| 1.0 / i as f64).collect()),
            3,
        )
        .unwrap();
        let x = sm.v.select_columns(&[0, 1, 2]).transpose();
        let (f, s) = rangefinder_error(&sm.a, &x).unwrap();
        let tail: f64 = sm.sigma[3..].iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((f - tail).abs() < 1e-12);
        assert!((s - sm.sigma[3]).abs() < 1e-12);
        let square = sm.a.row_range(0, 20);
        let (f0, s0) = rangefinder_error(&square, &square).unwrap();
        assert!(f0 < 1e-12 && s0 < 1e-12);
    }
}
