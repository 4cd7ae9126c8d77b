use std::time::Instant;

use randskel::linalg::cpqr::cpqr_pivots;
use randskel::linalg::lu::lupp_pivots;
use randskel::linalg::{householder_qr, svd_thin};
use randskel::parallel::with_threads;
use randskel::rng::{self, derive_seed};
use randskel::sketch::{self, EmbeddingKind};
use randskel::DenseMatrix;

use super::Outcome;
use crate::config::ExperimentConfig;
use crate::error::{Check, CliError, Result};
use crate::output::{Plot, ResultRow, Series};

/// Median wall time of `repeats` single-threaded runs of `f`, in nanoseconds.
pub fn time_median<T, F: Fn() -> T + Send + Sync>(repeats: usize, f: F) -> u128
where
    T: Send,
{
    with_threads(1, || {
        let mut v: Vec<u128> = (0..repeats.max(1))
            .map(|_| {
                let t = Instant::now();
                std::hint::black_box(f());
                t.elapsed().as_nanos()
            })
            .collect();
        v.sort_unstable();
        // Lower median for even counts keeps the value an actual measurement.
        v[(v.len() - 1) / 2]
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Lupp,
    Cpqr,
    Deim,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Lupp => "lupp",
            Scheme::Cpqr => "cpqr",
            Scheme::Deim => "deim",
        }
    }
}

/// Inputs of the pivoting comparison: `A` (n x n), the row sketch `X = Γ A`
/// (l x n) and the column sketch `Y = A Ω^T` (n x l).
pub struct PivotProblem {
    pub a: DenseMatrix,
    pub x: DenseMatrix,
    pub y: DenseMatrix,
}

impl PivotProblem {
    pub fn new(n: usize, l: usize, seed: u64) -> randskel::Result<Self> {
        let mut g = rng::from_seed(seed);
        let a = rng::gaussian_matrix(n, n, 1.0, &mut g);
        let gamma = sketch::make(EmbeddingKind::Gaussian, l, n, derive_seed(seed, 1))?;
        let omega = sketch::make(EmbeddingKind::Gaussian, l, n, derive_seed(seed, 2))?;
        let x = sketch::sketch_rows(&gamma, &a)?;
        let y = sketch::sketch_cols(&omega, &a)?;
        Ok(PivotProblem { a, x, y })
    }

    /// Column skeletons by one scheme. DEIM runs its whole pipeline: basis of
    /// Y, `Q^T A`, its SVD, then LUPP on the right singular vectors.
    pub fn run(&self, scheme: Scheme) -> randskel::Result<Vec<usize>> {
        let l = self.x.rows();
        Ok(match scheme {
            Scheme::Lupp => lupp_pivots(&self.x.transpose(), l),
            Scheme::Cpqr => cpqr_pivots(&self.x, l),
            Scheme::Deim => {
                let q = householder_qr(&self.y).q;
                let b = q.t_matmul(&self.a);
                let s = svd_thin(&b)?;
                lupp_pivots(&s.v, l)
            }
        })
    }
}

pub fn run_pivot(cfg: &ExperimentConfig) -> Result<Outcome> {
    let exp = cfg.experiment.id();
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        for &l in cfg.ranks.iter().filter(|&&l| l <= n) {
            let p = PivotProblem::new(n, l, derive_seed(cfg.seed, (n * 7919 + l) as u64)).check("pivot problem")?;
            for scheme in [Scheme::Lupp, Scheme::Cpqr, Scheme::Deim] {
                p.run(scheme).check(scheme.name())?;
                let ns = time_median(cfg.repeats, || p.run(scheme));
                let id = format!("gaussian:m={n},n={n}");
                rows.push(ResultRow::new(exp, scheme.name(), &id, "median_s", ns as f64 * 1e-9).l(l).nanos(ns));
            }
        }
    }
    sort_rows(&mut rows);
    let plot = timing_plot(&rows, "Pivoting time (single thread)", cfg);
    Ok(Outcome { rows, diagnostics: Vec::new(), plot })
}

pub fn run_sketch(cfg: &ExperimentConfig) -> Result<Outcome> {
    let exp = cfg.experiment.id();
    let kinds = [
        ("gaussian", EmbeddingKind::Gaussian),
        ("srtt", EmbeddingKind::Srtt),
        ("sparse-sign", EmbeddingKind::SparseSign(None)),
    ];
    let mut rows = Vec::new();
    for &m in &cfg.sizes {
        let mut g = rng::from_seed(derive_seed(cfg.seed, m as u64));
        let a = rng::gaussian_matrix(m, cfg.width, 1.0, &mut g);
        for &l in cfg.ranks.iter().filter(|&&l| l <= m) {
            for (name, kind) in kinds {
                if matches!(kind, EmbeddingKind::SparseSign(_)) && l < 2 {
                    continue;
                }
                let op = sketch::make(kind, l, m, derive_seed(cfg.seed, l as u64)).check(name)?;
                let ns = time_median(cfg.repeats, || op.apply(&a));
                let id = format!("gaussian:m={m},n={}", cfg.width);
                rows.push(ResultRow::new(exp, name, &id, "median_s", ns as f64 * 1e-9).l(l).nanos(ns));
            }
        }
    }
    if rows.is_empty() {
        return Err(CliError::config("no (size, l) pair with l <= size"));
    }
    sort_rows(&mut rows);
    let plot = timing_plot(&rows, "Sketch application time (single thread)", cfg);
    Ok(Outcome { rows, diagnostics: Vec::new(), plot })
}

fn size_of(r: &ResultRow) -> usize {
    r.matrix
        .split(['=', ','])
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

/// Orders rows by (scheme, size, l).
fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        (a.method.as_str(), size_of(a), a.param_l).cmp(&(b.method.as_str(), size_of(b), b.param_l))
    });
}

fn timing_plot(rows: &[ResultRow], title: &str, cfg: &ExperimentConfig) -> Plot {
    // One curve per (scheme, l) against the size.
    let mut series: Vec<Series> = Vec::new();
    for r in rows {
        let name = format!("{} l={}", r.method, r.param_l.unwrap_or(0));
        let point = (size_of(r) as f64, r.value);
        match series.iter_mut().find(|s| s.name == name) {
            Some(s) => s.points.push(point),
            None => series.push(Series { name, points: vec![point] }),
        }
    }
    Plot {
        title: format!("{title}, median of {}", cfg.repeats),
        x_label: "size".into(),
        y_label: "seconds".into(),
        log_y: true,
        series,
    }
}
