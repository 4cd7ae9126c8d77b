//! Parallel vs single-thread throughput of the hot kernels. Build with
//! `--no-default-features` to time the purely sequential fallback.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use randskel::angles::{unbiased_estimates, Side};
use randskel::linalg::{householder_qr, lu::lupp_pivots};
use randskel::parallel::with_threads;
use randskel::rng;
use randskel::sketch::{self, EmbeddingKind};
use randskel::testmat::SpectrumProfile;

fn modes() -> [(&'static str, usize); 2] {
    // 0 selects the default (all cores) pool.
    [("parallel", 0), ("single", 1)]
}

fn matmul(c: &mut Criterion) {
    let mut g = rng::from_seed(1);
    let a = rng::gaussian_matrix(400, 400, 1.0, &mut g);
    let mut group = c.benchmark_group("matmul_400");
    for (name, threads) in modes() {
        group.bench_function(name, |b| b.iter(|| with_threads(threads, || a.matmul(&a))));
    }
    group.finish();
}

fn qr(c: &mut Criterion) {
    let mut g = rng::from_seed(2);
    let a = rng::gaussian_matrix(1000, 200, 1.0, &mut g);
    let mut group = c.benchmark_group("householder_qr_1000x200");
    for (name, threads) in modes() {
        group.bench_function(name, |b| b.iter(|| with_threads(threads, || householder_qr(&a))));
    }
    group.finish();
}

fn sketches(c: &mut Criterion) {
    let mut g = rng::from_seed(3);
    let a = rng::gaussian_matrix(2048, 256, 1.0, &mut g);
    let mut group = c.benchmark_group("sketch_2048x256_l128");
    group.sample_size(20);
    for kind in [EmbeddingKind::Gaussian, EmbeddingKind::Srtt, EmbeddingKind::SparseSign(None)] {
        let op = sketch::make(kind, 128, 2048, 4).unwrap();
        for (name, threads) in modes() {
            group.bench_with_input(BenchmarkId::new(format!("{kind:?}"), name), &op, |b, op| {
                b.iter(|| with_threads(threads, || op.apply(&a).unwrap()))
            });
        }
    }
    group.finish();
}

fn pivots(c: &mut Criterion) {
    let mut g = rng::from_seed(5);
    let x = rng::gaussian_matrix(2000, 200, 1.0, &mut g);
    let mut group = c.benchmark_group("lupp_pivots_2000x200");
    group.sample_size(20);
    for (name, threads) in modes() {
        group.bench_function(name, |b| b.iter(|| with_threads(threads, || lupp_pivots(&x, 200))));
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let sigma = SpectrumProfile::SlowDecay { r1: 20 }.values(300);
    let mut group = c.benchmark_group("unbiased_estimates_8_trials");
    group.sample_size(10);
    for (name, threads) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| with_threads(threads, || unbiased_estimates(&sigma, 20, 40, 1, 8, 9, Side::Left).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, matmul, qr, sketches, pivots, monte_carlo);
criterion_main!(benches);
