//! Canonical angles between subspaces and the prior / posterior bounds and
//! estimates for the randomized SVD.

use crate::error::{Error, Result};
use crate::linalg::{qr_ortho, spectral_norm, singular_values, svd_thin};
use crate::matrix::DenseMatrix;
use crate::parallel;
use crate::rangefinder::LowRankSvd;
use crate::rng;

/// Sines of canonical angles, nondecreasing, in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct AngleVector {
    pub sines: Vec<f64>,
}

impl AngleVector {
    pub fn len(&self) -> usize {
        self.sines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sines.is_empty()
    }

    /// Largest sine, i.e. `||sin ∠||_2`.
    pub fn spectral(&self) -> f64 {
        self.sines.last().copied().unwrap_or(0.0)
    }

    pub fn frobenius(&self) -> f64 {
        self.sines.iter().map(|s| s * s).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// Left singular subspace, `U_k` against `U_hat`.
    Left,
    /// Right singular subspace, `V_k` against `V_hat`.
    Right,
}

impl Side {
    /// Exponent p of σ in the prior bounds: 4q+2 (left) or 4q+4 (right).
    pub fn exponent(self, q: usize) -> i32 {
        match self {
            Side::Left => 4 * q as i32 + 2,
            Side::Right => 4 * q as i32 + 4,
        }
    }
}

/// Canonical angles between `range(u)` (d x a) and `range(v)` (d x b), a >= b.
/// Sines come from the singular values of `(I - Q_U Q_U^T) Q_V`, which stay
/// accurate for tiny angles.
pub fn canonical_angles(u: &DenseMatrix, v: &DenseMatrix) -> Result<AngleVector> {
    if u.rows() != v.rows() {
        return Err(Error::ShapeMismatch(format!("ambient dims {} vs {}", u.rows(), v.rows())));
    }
    if u.cols() < v.cols() {
        return Err(Error::BadShape(format!("need dim U >= dim V, got {} < {}", u.cols(), v.cols())));
    }
    let qu = qr_ortho(u)?;
    let qv = qr_ortho(v)?;
    let p = crate::linalg::solve::project_out(&qu, &qv);
    let mut sines: Vec<f64> = singular_values(&p)?.into_iter().map(|s| s.clamp(0.0, 1.0)).collect();
    sines.reverse();
    Ok(AngleVector { sines })
}

/// Cosines `σ_i(Q_U^T Q_V)`, nonincreasing; the cross-check route.
pub fn canonical_cosines(u: &DenseMatrix, v: &DenseMatrix) -> Result<Vec<f64>> {
    let qu = qr_ortho(u)?;
    let qv = qr_ortho(v)?;
    Ok(singular_values(&qu.t_matmul(&qv))?.into_iter().map(|c| c.clamp(0.0, 1.0)).collect())
}

/// Inputs of the space-agnostic prior bounds.
#[derive(Clone, Debug)]
pub struct PriorBoundInputs {
    /// Full (or padded) spectrum, length r, positive and nonincreasing.
    pub sigma: Vec<f64>,
    pub k: usize,
    pub l: usize,
    pub q: usize,
    pub eps1: f64,
    pub eps2: f64,
    pub side: Side,
}

impl PriorBoundInputs {
    /// Uses `eps1 = sqrt(k/l)`, `eps2 = sqrt(l/(r-k))`.
    pub fn new(sigma: Vec<f64>, k: usize, l: usize, q: usize, side: Side) -> Self {
        let (eps1, eps2) = default_eps(sigma.len(), k, l);
        Self { sigma, k, l, q, eps1, eps2, side }
    }

    /// Default lower-bound constants, twice the upper-bound ones.
    pub fn default_lower_eps(&self) -> (f64, f64) {
        (2.0 * self.eps1, 2.0 * self.eps2)
    }
}

/// `(sqrt(k/l), sqrt(l/(r-k)))`.
pub fn default_eps(r: usize, k: usize, l: usize) -> (f64, f64) {
    let tail = r.saturating_sub(k).max(1) as f64;
    ((k as f64 / l as f64).sqrt(), (l as f64 / tail).sqrt())
}

#[derive(Clone, Debug)]
pub struct PriorBounds {
    /// Per-index upper bounds on `sin ∠_i`, i = 1..k.
    pub upper: Vec<f64>,
    /// Per-index lower bounds; all zero when the lower distortion factor is
    /// unbounded (`eps2' >= 1`).
    pub lower: Vec<f64>,
    /// `(Σ_{j>k} σ_j^p)^2 / Σ_{j>k} σ_j^{2p}`, in (1, r-k].
    pub tail_flatness: f64,
}

/// Space-agnostic prior bounds, linear in r:
/// `(1 + c · l σ_i^p / Σ_{j>k} σ_j^p)^{-1/2}` with `c = (1-ε1)/(1+ε2)` for the
/// upper and `c = (1+ε1')/(1-ε2')` for the lower bound.
pub fn prior_space_agnostic(inputs: &PriorBoundInputs, lower_eps: Option<(f64, f64)>) -> Result<PriorBounds> {
    let PriorBoundInputs { sigma, k, l, q, eps1, eps2, side } = inputs;
    let (k, l, r) = (*k, *l, sigma.len());
    if k >= r {
        return Err(Error::EmptyTail { k, r });
    }
    if k == 0 || l <= k {
        return Err(Error::BadShape(format!("prior bounds need 0 < k < l, got k={k}, l={l}")));
    }
    check_spectrum(sigma)?;
    for e in [*eps1, *eps2] {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::BadShape(format!("distortion constant {e} outside (0, 1)")));
        }
    }
    let p = side.exponent(*q);
    // Powers relative to σ_{k+1} so that large p cannot overflow.
    let base = sigma[k];
    let pw = |s: f64| (s / base).powi(p);
    let tail: f64 = sigma[k..].iter().map(|&s| pw(s)).sum();
    let tail2: f64 = sigma[k..].iter().map(|&s| pw(s) * pw(s)).sum();
    let bound = |c: f64, s: f64| (1.0 + c * l as f64 * pw(s) / tail).powf(-0.5);
    let c_up = (1.0 - eps1) / (1.0 + eps2);
    let upper = sigma[..k].iter().map(|&s| bound(c_up, s)).collect();
    let (e1, e2) = lower_eps.unwrap_or_else(|| inputs.default_lower_eps());
    let lower = if e2 < 1.0 {
        let c_lo = (1.0 + e1) / (1.0 - e2);
        sigma[..k].iter().map(|&s| bound(c_lo, s)).collect()
    } else {
        vec![0.0; k]
    };
    Ok(PriorBounds { upper, lower, tail_flatness: tail * tail / tail2 })
}

fn check_spectrum(sigma: &[f64]) -> Result<()> {
    if sigma.iter().any(|&s| !(s > 0.0 && s.is_finite())) || sigma.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::BadShape("spectrum must be positive and nonincreasing".into()));
    }
    Ok(())
}

/// Extends an approximate spectrum of length l to length r with copies of its
/// last value.
pub fn pad_spectrum(sigma_hat: &[f64], r: usize) -> Vec<f64> {
    let mut s = sigma_hat.to_vec();
    let last = s.last().copied().unwrap_or(0.0);
    s.resize(r.max(s.len()), last);
    s
}

/// Reference prior bound `(1 + σ_i^p / (σ_{k+1}^p ||Ω_2 Ω_1^†||_2^2))^{-1/2}`,
/// where Ω_1 (k x l) and Ω_2 ((r-k) x l) are the sketch in the right singular basis.
pub fn prior_reference_bound(
    sigma: &[f64],
    k: usize,
    q: usize,
    omega1: &DenseMatrix,
    omega2: &DenseMatrix,
    side: Side,
) -> Result<Vec<f64>> {
    if k >= sigma.len() {
        return Err(Error::EmptyTail { k, r: sigma.len() });
    }
    if omega1.rows() != k || omega1.cols() != omega2.cols() {
        return Err(Error::ShapeMismatch("Omega1 must be k x l and share l with Omega2".into()));
    }
    // Ω_1^† = W S^{-1} U^T from Ω_1 = U S W^T; full row rank needs k nonzero σ.
    let s1 = svd_thin(omega1)?;
    if s1.sigma.len() < k || s1.sigma[k - 1] <= crate::linalg::RANK_TOL * s1.sigma[0] {
        return Err(Error::SingularOmega1);
    }
    let inv: Vec<f64> = s1.sigma.iter().map(|s| 1.0 / s).collect();
    let pinv = s1.v.scale_columns(&inv).matmul_t(&s1.u);
    let nrm = spectral_norm(&omega2.matmul(&pinv))?;
    let p = side.exponent(q);
    Ok(sigma[..k]
        .iter()
        .map(|&s| {
            if nrm == 0.0 {
                0.0
            } else {
                let ratio = (s / sigma[k]).powi(p) / (nrm * nrm);
                (1.0 + ratio).powf(-0.5)
            }
        })
        .collect())
}

/// Per-index mean, min and max over trials.
#[derive(Clone, Debug)]
pub struct UnbiasedEstimates {
    pub mean: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// Monte-Carlo estimates of `sin ∠_i` from the spectrum alone: per trial draw a
/// Gaussian Ω (r x l), weight its head and tail rows by `σ^{p/2}`, and map the
/// singular values ν of `Ω~_1 Ω~_2^†` to `1/sqrt(1 + ν^2)`.
pub fn unbiased_estimates(
    sigma: &[f64],
    k: usize,
    l: usize,
    q: usize,
    trials: usize,
    seed: u64,
    side: Side,
) -> Result<UnbiasedEstimates> {
    let r = sigma.len();
    if k >= r {
        return Err(Error::EmptyTail { k, r });
    }
    if k == 0 || l <= k || trials == 0 {
        return Err(Error::BadShape(format!("need 0 < k < l and trials >= 1, got k={k}, l={l}, trials={trials}")));
    }
    if r - k < l {
        return Err(Error::TailRankDeficient { tail: r - k, l });
    }
    check_spectrum(sigma)?;
    let half = side.exponent(q) / 2;
    let w: Vec<f64> = sigma.iter().map(|&s| (s / sigma[k]).powi(half)).collect();
    let per_trial: Vec<Result<Vec<f64>>> = parallel::map_indexed(trials, |t| {
        let mut g = rng::substream(seed, t as u64);
        let omega = rng::gaussian_matrix(r, l, 1.0 / (l as f64).sqrt(), &mut g);
        let o1 = omega.row_range(0, k).scale_rows(&w[..k]);
        let o2 = omega.row_range(k, r).scale_rows(&w[k..]);
        // Ω~_2 = U_2 S_2 W_2^T, so Ω~_1 Ω~_2^† has the singular values of Ω~_1 W_2 S_2^{-1}.
        let s2 = svd_thin(&o2)?;
        if s2.sigma[l - 1] <= crate::linalg::RANK_TOL * s2.sigma[0] {
            return Err(Error::TailRankDeficient { tail: r - k, l });
        }
        let inv: Vec<f64> = s2.sigma.iter().map(|s| 1.0 / s).collect();
        let nu = singular_values(&o1.matmul(&s2.v).scale_columns(&inv))?;
        Ok(nu.iter().map(|&v| 1.0 / (1.0 + v * v).sqrt()).collect())
    });
    let mut mean = vec![0.0; k];
    let mut min = vec![f64::INFINITY; k];
    let mut max = vec![0.0f64; k];
    for theta in per_trial {
        let theta = theta?;
        for i in 0..k {
            mean[i] += theta[i];
            min[i] = min[i].min(theta[i]);
            max[i] = max[i].max(theta[i]);
        }
    }
    mean.iter_mut().for_each(|m| *m /= trials as f64);
    Ok(UnbiasedEstimates { mean, min, max })
}

/// Residual-spectrum posterior bounds for `sin ∠_i`, i = 1..k:
/// `min{σ_{k-i+1}(Res)/σ_k, σ_1(Res)/σ_i}` with `Res = (I - Û Û^T) A` (left) or
/// `A (I - V̂ V̂^T)` (right), clipped to [0, 1].
pub fn posterior_simple(a: &DenseMatrix, basis: &DenseMatrix, sigma: &[f64], k: usize, side: Side) -> Result<Vec<f64>> {
    let res = match side {
        Side::Left => {
            if basis.rows() != a.rows() {
                return Err(Error::ShapeMismatch("left basis must have m rows".into()));
            }
            crate::linalg::solve::project_out(basis, a)
        }
        Side::Right => {
            if basis.rows() != a.cols() {
                return Err(Error::ShapeMismatch("right basis must have n rows".into()));
            }
            crate::linalg::solve::project_out_rows(a, basis)
        }
    };
    if sigma.len() < k || k == 0 {
        return Err(Error::ShapeMismatch(format!("need at least k={k} singular values")));
    }
    let rs = singular_values(&res)?;
    let sk = sigma[k - 1];
    Ok((1..=k)
        .map(|i| {
            let first = rs.get(k - i).copied().unwrap_or(0.0) / sk;
            let second = rs[0] / sigma[i - 1];
            first.min(second).clamp(0.0, 1.0)
        })
        .collect())
}

/// Residual norms, gaps and bounds of the residual-gap posterior theorem.
#[derive(Clone, Debug)]
pub struct PosteriorGapReport {
    /// `σ_k > σ̂_{k+1}` and `σ_k > ||E33||_2`; bounds are meaningless otherwise.
    pub valid: bool,
    pub norm_e31_e32_fro: f64,
    pub norm_e31_e32_2: f64,
    pub norm_e32_2: f64,
    pub norm_e33_2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub big_gamma1: f64,
    pub big_gamma2: f64,
    /// Norm-level bounds as `[spectral, frobenius]`.
    pub uk_ul: [f64; 2],
    pub vk_vl: [f64; 2],
    pub uk_uk: [f64; 2],
    pub vk_vk: [f64; 2],
    /// Per-angle bounds for the i-th smallest sine, i = 1..k.
    pub uk_ul_angles: Vec<f64>,
    pub vk_vl_angles: Vec<f64>,
    pub uk_uk_angles: Vec<f64>,
    pub vk_vk_angles: Vec<f64>,
}

/// Posterior bounds from residual norms only. `sigma` holds at least k true or
/// padded singular values. Never fails on gap violation; `valid` says whether
/// the gap conditions hold.
pub fn posterior_gap(a: &DenseMatrix, svd: &LowRankSvd, sigma: &[f64], k: usize) -> Result<PosteriorGapReport> {
    let l = svd.sigma_hat.len();
    if k == 0 || k >= l {
        return Err(Error::BadShape(format!("residual-gap bounds need 0 < k < l, got k={k}, l={l}")));
    }
    if sigma.len() < k {
        return Err(Error::ShapeMismatch(format!("need at least k={k} singular values")));
    }
    if svd.u_hat.rows() != a.rows() || svd.v_hat.rows() != a.cols() {
        return Err(Error::ShapeMismatch("approximation does not match A".into()));
    }
    let resid = a.sub(&svd.reconstruct());
    let e = resid.matmul(&svd.v_hat);
    let n_f = e.fro_norm();
    let n_2 = spectral_norm(&e)?;
    let e32 = spectral_norm(&e.column_range(k, l))?;
    let e33 = spectral_norm(&crate::linalg::solve::project_out_rows(a, &svd.v_hat))?;
    let sk = sigma[k - 1];
    let shat = svd.sigma_hat[k];
    let valid = sk > shat && sk > e33;
    let g1 = (sk * sk - shat * shat) / sk;
    let g2 = (sk * sk - shat * shat) / shat;
    let big1 = (sk * sk - e33 * e33) / sk;
    let big2 = (sk * sk - e33 * e33) / e33;
    let norms = [n_2, n_f];
    let uk_ul = norms.map(|n| n / big1);
    let vk_vl = norms.map(|n| n / big2);
    let uk_uk = norms.map(|n| n / big1 * (1.0 + (e32 / g2).powi(2)).sqrt());
    let vk_vk = norms.map(|n| n / big1 * ((e32 / g1).powi(2) + (e33 / sk).powi(2)).sqrt());
    // The i-th smallest sine pairs with σ_k / σ_i.
    let f: Vec<f64> = (0..k).map(|i| sk / sigma[i]).collect();
    Ok(PosteriorGapReport {
        valid,
        norm_e31_e32_fro: n_f,
        norm_e31_e32_2: n_2,
        norm_e32_2: e32,
        norm_e33_2: e33,
        gamma1: g1,
        gamma2: g2,
        big_gamma1: big1,
        big_gamma2: big2,
        uk_ul,
        vk_vl,
        uk_uk,
        vk_vk,
        uk_ul_angles: f.iter().map(|fi| fi * n_2 / big1).collect(),
        vk_vl_angles: f.iter().map(|fi| fi * n_2 / big2).collect(),
        uk_uk_angles: f.iter().map(|fi| n_2 / big1 * (1.0 + (fi * e32 / g2).powi(2)).sqrt()).collect(),
        vk_vk_angles: f
            .iter()
            .map(|fi| n_2 / big1 * ((fi * e32 / g1).powi(2) + (e33 / sk).powi(2)).sqrt())
            .collect(),
    })
}

/// Budget-balance study parameters: budget `N = α k` matvecs, size
/// `r = (1 + β) k`, oversampling parameter γ, spectral gap `σ_1/σ_{k+1}`.
#[derive(Clone, Copy, Debug)]
pub struct BalanceConfig {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub gap: f64,
}

impl BalanceConfig {
    /// Largest q with `2q + 1 <= α/γ²`, if any.
    pub fn max_q(&self) -> Option<usize> {
        let lim = self.alpha / (self.gamma * self.gamma);
        if lim < 1.0 {
            None
        } else {
            Some(((lim - 1.0) / 2.0).floor() as usize)
        }
    }

    /// Sketch size `N / (2q + 1)` (real valued).
    pub fn l(&self, q: usize) -> f64 {
        self.alpha * self.k as f64 / (2 * q + 1) as f64
    }

    fn check(&self, q: usize) -> Result<()> {
        if !(self.gamma > 1.0) || !(self.alpha > 0.0) || !(self.beta > 0.0) {
            return Err(Error::BadShape("balance needs gamma > 1, alpha > 0, beta > 0".into()));
        }
        match self.max_q() {
            Some(m) if q <= m => Ok(()),
            m => Err(Error::InadmissibleQ { q, max: m.unwrap_or(0) }),
        }
    }
}

/// `φ_γ(q) = (1 + (α - γ sqrt(α(2q+1))) / (β(2q+1) + γ sqrt(αβ(2q+1))) · gap^{4q+2})^{-1/2}`.
pub fn balance_phi(config: &BalanceConfig, q: usize) -> Result<f64> {
    config.check(q)?;
    let BalanceConfig { alpha, beta, gamma, gap, .. } = *config;
    let t = (2 * q + 1) as f64;
    let c = (alpha - gamma * (alpha * t).sqrt()) / (beta * t + gamma * (alpha * beta * t).sqrt());
    Ok((1.0 + c * gap.powi(4 * q as i32 + 2)).powf(-0.5))
}

/// The same quantity written through l, ε_1 = γ sqrt(k/l) and ε_2 = γ sqrt(l/(r-k)).
pub fn balance_phi_l_form(config: &BalanceConfig, q: usize) -> Result<f64> {
    config.check(q)?;
    let k = config.k as f64;
    let l = config.l(q);
    let tail = config.beta * k;
    let e1 = config.gamma * (k / l).sqrt();
    let e2 = config.gamma * (l / tail).sqrt();
    let c = (1.0 - e1) / (1.0 + e2) * l / tail;
    Ok((1.0 + c * config.gap.powi(4 * q as i32 + 2)).powf(-0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contained_and_orthogonal_subspaces() {
        let u = DenseMatrix::from_fn(5, 3, |i, j| if i == j { 1.0 } else { 0.0 });
        let v = DenseMatrix::from_fn(5, 2, |i, j| if i == j + 1 { 2.0 } else { 0.0 });
        assert!(canonical_angles(&u, &v).unwrap().sines.iter().all(|&s| s < 1e-15));
        let w = DenseMatrix::from_fn(5, 2, |i, j| if i == j + 3 { 1.0 } else { 0.0 });
        assert!(canonical_angles(&u, &w).unwrap().sines.iter().all(|&s| (s - 1.0).abs() < 1e-15));
    }

    #[test]
    fn flat_tail_flatness_and_default_eps() {
        let mut sigma = vec![2.0; 5];
        sigma.extend(vec![1.0; 20]);
        let b = prior_space_agnostic(&PriorBoundInputs::new(sigma, 5, 10, 1, Side::Left), None).unwrap();
        assert!((b.tail_flatness - 20.0).abs() < 1e-12);
        let (e1, e2) = default_eps(500, 50, 200);
        assert!((e1 - 0.5).abs() < 1e-15);
        assert!((e2 - (4.0f64 / 9.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn upper_bound_decreases_with_q_on_a_step() {
        let mut sigma = vec![1.5; 10];
        sigma.extend(vec![1.0; 320]);
        let at = |q| prior_space_agnostic(&PriorBoundInputs::new(sigma.clone(), 10, 40, q, Side::Left), None).unwrap().upper;
        let (b0, b2) = (at(0), at(2));
        assert!(b0.iter().zip(&b2).all(|(x, y)| y < x));
    }

    #[test]
    fn reference_bound_limits() {
        let sigma = vec![3.0, 2.0, 1.0, 1.0, 1.0];
        let o1 = DenseMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let zero = DenseMatrix::zeros(3, 3);
        assert!(prior_reference_bound(&sigma, 2, 0, &o1, &zero, Side::Left).unwrap().iter().all(|&b| b == 0.0));
        // σ_i = σ_{k+1} and ||Ω_2 Ω_1^†|| = 1.
        let flat = vec![1.0; 5];
        let o2 = DenseMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]]).unwrap();
        for b in prior_reference_bound(&flat, 2, 0, &o1, &o2, Side::Left).unwrap() {
            assert!((b - 0.5f64.sqrt()).abs() < 1e-15);
        }
        let singular = DenseMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(prior_reference_bound(&sigma, 2, 0, &singular, &o2, Side::Left), Err(Error::SingularOmega1)));
    }

    #[test]
    fn tail_must_cover_l() {
        let sigma = vec![1.0; 30];
        assert!(matches!(
            unbiased_estimates(&sigma, 10, 25, 0, 3, 0, Side::Left),
            Err(Error::TailRankDeficient { tail: 20, l: 25 })
        ));
    }

    #[test]
    fn gamma2_identity() {
        // ||E33|| = σ_k/2 gives Γ_2 = 1.5 σ_k.
        let sk: f64 = 0.8;
        let e33 = sk / 2.0;
        assert!(((sk * sk - e33 * e33) / e33 - 1.5 * sk).abs() < 1e-15);
    }

    #[test]
    fn phi_forms_agree_and_stay_in_range() {
        for gap in [1.0, 1.01, 1.5] {
            let c = BalanceConfig { k: 10, alpha: 16.0, beta: 32.0, gamma: 1.05, gap };
            for q in 0..=c.max_q().unwrap() {
                let a = balance_phi(&c, q).unwrap();
                let b = balance_phi_l_form(&c, q).unwrap();
                assert!((a - b).abs() < 1e-12);
                assert!(a > 0.0 && a < 1.0);
            }
            assert!(matches!(balance_phi(&c, 7), Err(Error::InadmissibleQ { q: 7, max: 6 })));
        }
    }

    #[test]
    fn phi_argmin_flips_with_gap() {
        let argmin = |gap| {
            let c = BalanceConfig { k: 10, alpha: 16.0, beta: 32.0, gamma: 1.05, gap };
            (0..=c.max_q().unwrap())
                .min_by(|&a, &b| balance_phi(&c, a).unwrap().total_cmp(&balance_phi(&c, b).unwrap()))
                .unwrap()
        };
        assert_eq!(argmin(1.01), 0);
        assert_eq!(argmin(1.5), 6);
    }

    #[test]
    fn phi_increases_with_q_without_gap() {
        let c = BalanceConfig { k: 10, alpha: 16.0, beta: 32.0, gamma: 1.05, gap: 1.0 };
        let v: Vec<f64> = (0..=6).map(|q| balance_phi(&c, q).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }
}
