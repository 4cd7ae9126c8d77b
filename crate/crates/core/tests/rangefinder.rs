mod common;

use common::*;
use randskel::angles::canonical_angles;
use randskel::linalg::{qr_ortho, svd_thin};
use randskel::rangefinder::{power_iter_plain, power_iter_stable, randomized_svd, rangefinder_error};
use randskel::sketch::{make_gaussian, srtt_from_parts, EmbeddingKind};
use randskel::testmat::{gen_gaussian_spectrum, SpectrumProfile};
use randskel::{DenseMatrix, Error};

fn with_spectrum(m: usize, n: usize, sigma: &[f64], seed: u64) -> DenseMatrix {
    gen_gaussian_spectrum(m, n, &SpectrumProfile::Explicit(sigma.to_vec()), seed).unwrap().a
}

#[test]
fn plain_iteration_q0_is_the_column_sketch() {
    let a = random(20, 15, 1);
    let om = make_gaussian(4, 15, 2).unwrap();
    let y = power_iter_plain(&a, &om, 0).unwrap();
    assert!(rel_diff(&y, &naive_matmul(&a, &naive_transpose(&om.to_dense()))) < 1e-14);
}

#[test]
fn plain_iteration_diagonal_powers() {
    // Γ is the 2-point Hartley matrix, so A Γ^T with A = diag(2^5, 1).
    let om = srtt_from_parts(vec![0, 1], vec![1.0, 1.0], vec![0, 1], 0).unwrap();
    let y = power_iter_plain(&DenseMatrix::from_diag(&[2.0, 1.0]), &om, 2).unwrap();
    let want = naive_matmul(&DenseMatrix::from_diag(&[32.0, 1.0]), &naive_transpose(&om.to_dense()));
    assert!(rel_diff(&y, &want) < 1e-15);
}

#[test]
fn plain_iteration_q1_matches_triple_product() {
    let a = random(20, 20, 3);
    let om = make_gaussian(5, 20, 4).unwrap();
    let y = power_iter_plain(&a, &om, 1).unwrap();
    let at = naive_transpose(&a);
    let want = naive_matmul(&naive_matmul(&a, &at), &naive_matmul(&a, &naive_transpose(&om.to_dense())));
    assert!(rel_diff(&y, &want) < 1e-12);
}

#[test]
fn stable_iteration_spans_plain_range() {
    let a = random(40, 30, 5);
    for q in 0..2 {
        let om = make_gaussian(6, 30, 6 + q as u64).unwrap();
        let qs = power_iter_stable(&a, &om, q).unwrap();
        let yp = power_iter_plain(&a, &om, q).unwrap();
        let s = canonical_angles(&qs, &yp).unwrap();
        assert!(s.spectral() < 1e-8);
    }
    let u = qr_ortho(&random(12, 4, 8)).unwrap();
    let om = make_gaussian(4, 4, 9).unwrap();
    let qs = power_iter_stable(&u, &om, 0).unwrap();
    assert!(canonical_angles(&u, &qs).unwrap().spectral() < 1e-10);
}

#[test]
fn stable_iteration_survives_ill_conditioning() {
    let sigma: Vec<f64> = (0..60).map(|i| 10f64.powf(-12.0 * i as f64 / 59.0)).collect();
    let a = with_spectrum(60, 60, &sigma, 10);
    let om = make_gaussian(20, 60, 11).unwrap();
    let qs = power_iter_stable(&a, &om, 3).unwrap();
    let defect = naive_matmul(&naive_transpose(&qs), &qs).sub(&DenseMatrix::identity(20));
    assert!(svd_thin(&defect).unwrap().sigma[0] < 1e-9);
    let plain = power_iter_plain(&a, &om, 3).unwrap();
    assert!(matches!(qr_ortho(&plain), Err(Error::RankDeficient { .. })));
}

#[test]
fn exact_rank_is_captured() {
    let a = random(50, 8, 12).matmul(&random(8, 40, 13));
    let s = randomized_svd(&a, 10, 0, 14, EmbeddingKind::Gaussian).unwrap();
    assert!(a.sub(&s.reconstruct()).fro_norm() < 1e-9 * a.fro_norm());
}

#[test]
fn interlacing_and_eckart_young_floor() {
    let sigma: Vec<f64> = (1..=40).map(|i| 1.0 / i as f64).collect();
    let a = with_spectrum(60, 45, &sigma, 15);
    for seed in 0..20 {
        for kind in [EmbeddingKind::Gaussian, EmbeddingKind::Srtt, EmbeddingKind::SparseSign(None)] {
            let s = randomized_svd(&a, 10, seed as usize % 3, seed, kind).unwrap();
            assert!(s.sigma_hat.windows(2).all(|w| w[1] <= w[0]));
            for (h, t) in s.sigma_hat.iter().zip(&sigma) {
                assert!(*h <= t * (1.0 + 1e-12));
            }
            let opt: f64 = sigma[10..].iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(a.sub(&s.reconstruct()).fro_norm() >= opt * (1.0 - 1e-12));
        }
    }
}

#[test]
fn diagonal_estimates_approach_truth() {
    let a = DenseMatrix::from_diag(&[5.0, 4.0, 3.0, 2.0, 1.0]);
    let truth = [5.0, 4.0, 3.0];
    let mut prev_gap = f64::INFINITY;
    for q in [0, 2, 6] {
        let mut gap = 0.0;
        for seed in 0..30 {
            let s = randomized_svd(&a, 3, q, seed, EmbeddingKind::Gaussian).unwrap();
            for (h, t) in s.sigma_hat.iter().zip(truth) {
                assert!(*h >= 0.0 && *h <= t * (1.0 + 1e-12));
                gap += t - h;
            }
        }
        assert!(gap < prev_gap);
        prev_gap = gap;
    }
}

#[test]
fn rangefinder_error_examples() {
    let sigma: Vec<f64> = (1..=12).map(|i| 2.0 / i as f64).collect();
    let sm = gen_gaussian_spectrum(20, 12, &SpectrumProfile::Explicit(sigma.clone()), 16).unwrap();
    let x = naive_transpose(&sm.v.column_range(0, 4));
    let (fro, spec) = rangefinder_error(&sm.a, &x).unwrap();
    assert!((fro - sigma[4..].iter().map(|s| s * s).sum::<f64>().sqrt()).abs() < 1e-12);
    assert!((spec - sigma[4]).abs() < 1e-12);
    let sq = random(9, 9, 17);
    let (f0, s0) = rangefinder_error(&sq, &sq).unwrap();
    assert!(f0 < 1e-12 * sq.fro_norm() && s0 < 1e-12 * sq.fro_norm());
}

#[test]
fn rangefinder_error_matches_pseudoinverse_oracle() {
    for seed in 0..10 {
        let a = random(25, 18, seed);
        let x = random(6, 18, seed + 100);
        let xt = naive_transpose(&x);
        // A (I - X^† X) with X^† = X^T (X X^T)^{-1}.
        let xpx = naive_matmul(&naive_matmul(&xt, &inverse(&naive_matmul(&x, &xt))), &x);
        let res = a.sub(&naive_matmul(&a, &xpx));
        let (fro, spec) = rangefinder_error(&a, &x).unwrap();
        assert!((fro - res.fro_norm()).abs() < 1e-11 * a.fro_norm());
        assert!((spec - gram_singular_values(&res)[0]).abs() < 1e-11 * a.fro_norm());
    }
}

#[test]
fn mean_error_nonincreasing_in_q() {
    let sigma: Vec<f64> = (1..=50).map(|i| (i as f64).powf(-0.5)).collect();
    let a = with_spectrum(80, 60, &sigma, 18);
    let mean_err = |q| {
        (0..200u64)
            .map(|seed| {
                let s = randomized_svd(&a, 10, q, seed, EmbeddingKind::Gaussian).unwrap();
                a.sub(&s.reconstruct()).fro_norm()
            })
            .sum::<f64>()
            / 200.0
    };
    let e: Vec<f64> = (0..3).map(mean_err).collect();
    assert!(e[1] <= e[0] && e[2] <= e[1], "{e:?}");
}

#[test]
fn reproducible_per_seed() {
    let a = random(30, 20, 19);
    let s1 = randomized_svd(&a, 5, 1, 20, EmbeddingKind::Srtt).unwrap();
    let s2 = randomized_svd(&a, 5, 1, 20, EmbeddingKind::Srtt).unwrap();
    assert_eq!(s1.u_hat, s2.u_hat);
    assert_eq!(s1.sigma_hat, s2.sigma_hat);
    assert_eq!(s1.v_hat, s2.v_hat);
}
