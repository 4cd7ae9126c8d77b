use crate::error::{Error, Result};
use crate::matrix::norm2;
use crate::rng;

/// Lower estimate of `||A||_2` by power iteration on `A^T A` from a seeded
/// Gaussian start. `apply` maps R^dim to the range, `apply_adjoint` back.
///
/// Every iterate is `||A v||` for a unit `v`, so the result never exceeds the
/// true norm (up to rounding).
pub fn spectral_norm_estimate<F, G>(
    apply: F,
    apply_adjoint: G,
    dim: usize,
    iters: usize,
    seed: u64,
) -> Result<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
    G: Fn(&[f64]) -> Vec<f64>,
{
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut g = rng::from_seed(seed);
    let mut v = rng::gaussian_vector(dim, &mut g);
    let mut best = 0.0f64;
    for _ in 0..iters.max(1) {
        let nv = norm2(&v);
        if nv == 0.0 {
            break;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        let w = apply(&v);
        best = best.max(norm2(&w));
        v = apply_adjoint(&w);
    }
    Ok(best)
}
