use randskel::angles::{
    canonical_angles, pad_spectrum, posterior_gap, posterior_simple, prior_reference_bound, prior_space_agnostic,
    unbiased_estimates, PriorBoundInputs, Side,
};
use randskel::parallel;
use randskel::rangefinder::randomized_svd;
use randskel::rng::derive_seed;
use randskel::sketch::{self, EmbeddingKind};
use randskel::DenseMatrix;

use super::Outcome;
use crate::config::ExperimentConfig;
use crate::error::{Check, CliError, Result};
use crate::matrix::{Exact, MatrixSpec, TestMatrix};
use crate::output::{Plot, ResultRow, Series};

/// Trials of the spectrum-only Monte-Carlo estimates.
pub const ESTIMATE_TRIALS: usize = 3;

/// One named per-angle series for one side.
pub struct AngleSeries {
    pub name: String,
    pub side: Side,
    pub values: Vec<f64>,
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
    }
}

/// Everything the comparison reports for one randomized SVD run.
pub struct AngleRun {
    pub series: Vec<AngleSeries>,
    /// Gap-condition flags of the residual-gap bounds, (true σ, padded σ̂).
    pub gap_valid: (bool, bool),
}

/// True angles and every bound/estimate for `(l, q)` and one sketch seed.
pub fn angle_run(a: &DenseMatrix, exact: &Exact, k: usize, l: usize, q: usize, seed: u64) -> randskel::Result<AngleRun> {
    let r = exact.sigma.len();
    let s = randomized_svd(a, l, q, seed, EmbeddingKind::Gaussian)?;
    let uk = exact.u.column_range(0, k);
    let vk = exact.v.column_range(0, k);
    let padded = pad_spectrum(&s.sigma_hat, r);

    let omega = sketch::make(EmbeddingKind::Gaussian, l, a.cols(), seed)?.to_dense();
    let proj = omega.matmul(&exact.v).transpose();
    let (o1, o2) = (proj.row_range(0, k), proj.row_range(k, r));

    let mut series = Vec::new();
    let mut push = |name: &str, side: Side, values: Vec<f64>| {
        series.push(AngleSeries { name: name.to_owned(), side, values });
    };
    let gap_sigma = posterior_gap(a, &s, &exact.sigma, k)?;
    let gap_padded = posterior_gap(a, &s, &padded, k)?;
    for side in [Side::Left, Side::Right] {
        let (basis, target) = match side {
            Side::Left => (&s.u_hat, &uk),
            Side::Right => (&s.v_hat, &vk),
        };
        push("true", side, canonical_angles(basis, target)?.sines);
        for (tag, sigma) in [("sigma", &exact.sigma), ("padded", &padded)] {
            let inputs = PriorBoundInputs::new(sigma.clone(), k, l, q, side);
            let b = prior_space_agnostic(&inputs, Some(inputs.default_lower_eps()))?;
            push(&format!("prior_upper_{tag}"), side, b.upper);
            push(&format!("prior_lower_{tag}"), side, b.lower);
            if r - k >= l {
                let e = unbiased_estimates(sigma, k, l, q, ESTIMATE_TRIALS, derive_seed(seed, 17), side)?;
                push(&format!("estimate_mean_{tag}"), side, e.mean);
                push(&format!("estimate_min_{tag}"), side, e.min);
                push(&format!("estimate_max_{tag}"), side, e.max);
            }
            push(&format!("posterior_simple_{tag}"), side, posterior_simple(a, basis, sigma, k, side)?);
        }
        for (tag, rep) in [("sigma", &gap_sigma), ("padded", &gap_padded)] {
            if rep.valid {
                let v = match side {
                    Side::Left => rep.uk_ul_angles.clone(),
                    Side::Right => rep.vk_vl_angles.clone(),
                };
                push(&format!("posterior_gap_{tag}"), side, v);
            }
        }
        push("reference", side, prior_reference_bound(&exact.sigma, k, q, &o1, &o2, side)?);
    }
    Ok(AngleRun { series, gap_valid: (gap_sigma.valid, gap_padded.valid) })
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec: MatrixSpec = cfg.matrix.parse()?;
    let mat = TestMatrix::generate(&spec, cfg.seed)?;
    let a = mat
        .dense()
        .ok_or_else(|| CliError::config("angles needs a dense matrix (exact factors are required)"))?;
    // The cap also applies when the generator supplies the factors: every
    // bound works with the full m x r and n x r bases.
    mat.check_cap(cfg.max_exact)?;
    let exact = mat.exact(cfg.max_exact)?;
    let k = cfg.k;
    let r = exact.sigma.len();
    if let Some(&l) = cfg.ranks.iter().find(|&&l| l <= k || l >= r) {
        return Err(CliError::config(format!("each l must satisfy k < l < r (k={k}, r={r}), got {l}")));
    }
    if cfg.q.is_empty() {
        return Err(CliError::config("q grid is empty"));
    }
    let exp = cfg.experiment.id();
    let configs: Vec<(usize, usize, usize)> = cfg
        .ranks
        .iter()
        .flat_map(|&l| cfg.q.iter().flat_map(move |&q| (0..cfg.trials).map(move |t| (l, q, t))))
        .collect();
    let runs = parallel::map_indexed(configs.len(), |j| {
        let (l, q, t) = configs[j];
        angle_run(a, &exact, k, l, q, derive_seed(cfg.seed, t as u64)).check("angle bounds")
    });
    let mut rows = Vec::new();
    let mut plot_series = Vec::new();
    for (&(l, q, t), run) in configs.iter().zip(runs) {
        let run = run?;
        for s in &run.series {
            let method = format!("{}:{}", s.name, side_name(s.side));
            for (i, &v) in s.values.iter().enumerate() {
                rows.push(ResultRow::new(exp, &method, &mat.id, &format!("sin_{}", i + 1), v).l(l).q(q).trial(t));
            }
            if configs.first() == Some(&(l, q, t)) && s.side == Side::Left {
                plot_series.push(Series {
                    name: s.name.clone(),
                    points: s.values.iter().enumerate().map(|(i, &v)| ((i + 1) as f64, v)).collect(),
                });
            }
        }
        for (tag, valid) in [("sigma", run.gap_valid.0), ("padded", run.gap_valid.1)] {
            let method = format!("posterior_gap_{tag}");
            rows.push(ResultRow::new(exp, &method, &mat.id, "valid", f64::from(u8::from(valid))).l(l).q(q).trial(t));
        }
    }
    let (l0, q0) = configs.first().map(|c| (c.0, c.1)).unwrap_or((0, 0));
    let plot = Plot {
        title: format!("Left canonical angles, k={k}, l={l0}, q={q0}"),
        x_label: "i".into(),
        y_label: "sin angle".into(),
        log_y: true,
        series: plot_series,
    };
    Ok(Outcome { rows, diagnostics: Vec::new(), plot })
}
