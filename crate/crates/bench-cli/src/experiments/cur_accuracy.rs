use std::time::Instant;

use randskel::linalg::svd_thin;
use randskel::parallel;
use randskel::rng::derive_seed;
use randskel::skeleton::{self, build_cur_stable, SkeletonResult};
use randskel::{DenseMatrix, Error, LinearOperator};

use super::{median, Outcome};
use crate::config::{ExperimentConfig, Method};
use crate::error::{Check, CliError, Result};
use crate::matrix::{MatrixSpec, TestMatrix};
use crate::output::{Plot, ResultRow, Series};

/// Runs one selection method with skeleton size `l` (target rank k = l).
pub fn select(method: Method, a: &dyn LinearOperator, l: usize, seed: u64) -> randskel::Result<SkeletonResult> {
    match method {
        Method::RandLupp => skeleton::select_columns_lupp(a, l, 0, seed),
        Method::RandLupp1piter => skeleton::select_columns_lupp(a, l, 1, seed),
        Method::RandCpqr => skeleton::select_columns_cpqr(a, l, 0, seed),
        Method::RandCpqr1piter => skeleton::select_columns_cpqr(a, l, 1, seed),
        Method::RsvdDeim => skeleton::select_deim(a, l, 0, seed),
        Method::RsvdLs => skeleton::select_leverage(a, l, l, seed),
    }
}

/// Orthonormal basis of `range(M)` from a truncated SVD.
fn range_basis(m: &DenseMatrix) -> randskel::Result<DenseMatrix> {
    let s = svd_thin(m)?;
    let idx: Vec<usize> = (0..s.rank()).collect();
    Ok(s.u.select_columns(&idx))
}

/// `(L, R)` with `L R = C C^† A R^† R`. Falls back to rank-revealing bases
/// when sampled skeletons are linearly dependent; the projection only depends
/// on the two ranges. The flag reports the fallback.
pub fn cur_factors(a: &dyn LinearOperator, rows: &[usize], cols: &[usize]) -> randskel::Result<(DenseMatrix, DenseMatrix, bool)> {
    match build_cur_stable(a, rows, cols) {
        Ok(cur) => {
            let right = cur.u_mid.matmul(&cur.r);
            Ok((cur.c, right, false))
        }
        Err(Error::SingularSkeleton) => {
            let q_c = range_basis(&a.columns(cols))?;
            let q_r = range_basis(&a.rows_of(rows).transpose())?;
            let core = q_c.t_matmul(&a.apply(&q_r));
            Ok((q_c, core.matmul_t(&q_r), true))
        }
        Err(e) => Err(e),
    }
}

struct Job {
    method: Method,
    l: usize,
    trial: usize,
}

struct JobResult {
    rel_fro: f64,
    rel_2: f64,
    eta_column: Option<f64>,
    eta_row: Option<f64>,
    select_nanos: u128,
    cur_nanos: u128,
    dependent: bool,
}

/// Per (method, l, trial): relative Frobenius error of the stable CUR with the
/// selection time; plus the truncated-SVD baseline per l. Spectral errors,
/// η and CUR construction times go to the diagnostics rows.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec: MatrixSpec = cfg.matrix.parse()?;
    let mat = TestMatrix::generate(&spec, cfg.seed)?;
    let (m, n) = mat.shape();
    if let Some(&l) = cfg.ranks.iter().find(|&&l| l > m.min(n)) {
        return Err(CliError::config(format!("rank {l} exceeds min(m, n) = {}", m.min(n))));
    }
    let exp = cfg.experiment.id();
    let sigma = mat.singular_values(cfg.max_exact)?;
    let total2: f64 = sigma.iter().map(|s| s * s).sum();
    let fro = mat.fro_norm();
    let s1 = sigma.first().copied().unwrap_or(0.0);

    let jobs: Vec<Job> = cfg
        .methods
        .iter()
        .flat_map(|&method| {
            cfg.ranks
                .iter()
                .flat_map(move |&l| (0..cfg.trials).map(move |trial| Job { method, l, trial }))
        })
        .collect();
    let results = parallel::map_indexed(jobs.len(), |j| -> Result<JobResult> {
        let job = &jobs[j];
        // Paired trials: every method sees the same seed for a given trial.
        let seed = derive_seed(cfg.seed, job.trial as u64);
        let t = Instant::now();
        let sel = select(job.method, mat.op(), job.l, seed).check(job.method.name())?;
        let select_nanos = t.elapsed().as_nanos();
        let t = Instant::now();
        let rows = sel.rows.as_deref().unwrap_or(&[]);
        let (left, right, dependent) = cur_factors(mat.op(), rows, &sel.columns).check("stable CUR")?;
        let cur_nanos = t.elapsed().as_nanos();
        let (ef, e2) = mat.residual_norms(&left, &right, cfg.max_exact, seed)?;
        Ok(JobResult {
            rel_fro: ef / fro,
            rel_2: e2 / s1,
            eta_column: sel.eta_column,
            eta_row: sel.eta_row,
            select_nanos,
            cur_nanos,
            dependent,
        })
    });

    let mut rows = Vec::new();
    let mut diag = Vec::new();
    for (job, res) in jobs.iter().zip(results) {
        let r = res?;
        let (name, l, t) = (job.method.name(), job.l, job.trial);
        rows.push(ResultRow::new(exp, name, &mat.id, "rel_fro", r.rel_fro).l(l).trial(t).nanos(r.select_nanos));
        diag.push(ResultRow::new(exp, name, &mat.id, "rel_2", r.rel_2).l(l).trial(t).nanos(r.cur_nanos));
        if r.dependent {
            diag.push(ResultRow::new(exp, name, &mat.id, "dependent_skeleton", 1.0).l(l).trial(t));
        }
        for (metric, eta) in [("eta_column", r.eta_column), ("eta_row", r.eta_row)] {
            if let Some(e) = eta {
                diag.push(ResultRow::new(exp, name, &mat.id, metric, e).l(l).trial(t));
            }
        }
    }
    for &l in &cfg.ranks {
        let tail2: f64 = sigma.iter().skip(l).map(|s| s * s).sum();
        rows.push(ResultRow::new(exp, "tsvd", &mat.id, "opt_fro", (tail2 / total2).sqrt()).l(l));
        let next = sigma.get(l).copied().unwrap_or(0.0);
        diag.push(ResultRow::new(exp, "tsvd", &mat.id, "opt_2", next / s1).l(l));
    }

    let mut series: Vec<Series> = cfg
        .methods
        .iter()
        .map(|m| Series {
            name: m.name().to_owned(),
            points: cfg
                .ranks
                .iter()
                .map(|&l| {
                    let mut v: Vec<f64> = rows
                        .iter()
                        .filter(|r| r.method == m.name() && r.param_l == Some(l))
                        .map(|r| r.value)
                        .collect();
                    (l as f64, median(&mut v))
                })
                .collect(),
        })
        .collect();
    series.push(Series {
        name: "optimal rank-l".into(),
        points: rows.iter().filter(|r| r.method == "tsvd").map(|r| (r.param_l.unwrap_or(0) as f64, r.value)).collect(),
    });
    let plot = Plot {
        title: format!("CUR relative error, {}", mat.id),
        x_label: "l".into(),
        y_label: "median ||A - CUR||_F / ||A||_F".into(),
        log_y: true,
        series,
    };
    Ok(Outcome { rows, diagnostics: diag, plot })
}
