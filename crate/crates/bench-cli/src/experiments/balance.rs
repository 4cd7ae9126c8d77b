use randskel::angles::{balance_phi, canonical_angles, BalanceConfig};
use randskel::parallel;
use randskel::rangefinder::randomized_svd;
use randskel::rng::derive_seed;
use randskel::sketch::EmbeddingKind;
use randskel::testmat::{gen_gaussian_spectrum, step_size, SpectrumProfile};

use super::{median, Outcome};
use crate::config::ExperimentConfig;
use crate::error::{Check, CliError, Result};
use crate::output::{Plot, ResultRow, Series};

/// Admissible q values for one gap, restricted to the configured grid when
/// one is given.
pub fn admissible_q(bc: &BalanceConfig, grid: &[usize]) -> Vec<usize> {
    let Some(max) = bc.max_q() else { return Vec::new() };
    if grid.is_empty() {
        (0..=max).collect()
    } else {
        grid.iter().copied().filter(|&q| q <= max).collect()
    }
}

/// Sketch size for budget `α k` and `q` power steps.
pub fn sketch_size(bc: &BalanceConfig, q: usize) -> usize {
    bc.l(q).floor() as usize
}

/// Per gap: `φ_γ(q)` for each admissible q and the observed largest/mean sine
/// between `U_k` and the rank-l range estimate on a step matrix, with the
/// argmin of both over q.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let exp = cfg.experiment.id();
    let k = cfg.k;
    if cfg.beta.fract() != 0.0 || cfg.beta < 1.0 {
        return Err(CliError::config("beta must be a positive integer for the step matrix"));
    }
    let beta = cfg.beta as usize;
    let r = step_size(k, beta);
    let mut rows = Vec::new();
    let mut series = Vec::new();
    for &gap in &cfg.gaps {
        let bc = BalanceConfig { k, alpha: cfg.alpha, beta: cfg.beta, gamma: cfg.gamma, gap };
        let id = format!("step:k={k},beta={beta},gap={gap}");
        let qs: Vec<usize> = admissible_q(&bc, &cfg.q).into_iter().filter(|&q| sketch_size(&bc, q) > k).collect();
        if qs.is_empty() {
            return Err(CliError::config(format!("no admissible q for gap {gap}")));
        }
        let mut phi = Vec::new();
        for &q in &qs {
            let v = balance_phi(&bc, q).check("balance phi")?;
            rows.push(ResultRow::new(exp, "phi", &id, "phi", v).l(sketch_size(&bc, q)).q(q));
            phi.push(v);
        }

        let sm = gen_gaussian_spectrum(r, r, &SpectrumProfile::step(k, gap), cfg.seed).check("step generation")?;
        let uk = sm.u.column_range(0, k);
        let jobs: Vec<(usize, usize)> = qs.iter().flat_map(|&q| (0..cfg.trials).map(move |t| (q, t))).collect();
        let sines = parallel::map_indexed(jobs.len(), |j| {
            let (q, t) = jobs[j];
            let l = sketch_size(&bc, q).min(r);
            let s = randomized_svd(&sm.a, l, q, derive_seed(cfg.seed, t as u64), EmbeddingKind::Gaussian)
                .check("randomized SVD")?;
            Ok(canonical_angles(&s.u_hat, &uk).check("canonical angles")?.sines)
        });
        let mut per_q: Vec<Vec<Vec<f64>>> = vec![Vec::new(); qs.len()];
        for (&(q, t), s) in jobs.iter().zip(sines) {
            let s: Vec<f64> = s?;
            let l = sketch_size(&bc, q);
            let max = s.iter().copied().fold(0.0, f64::max);
            let mean = s.iter().sum::<f64>() / s.len() as f64;
            rows.push(ResultRow::new(exp, "true", &id, "sin_max", max).l(l).q(q).trial(t));
            rows.push(ResultRow::new(exp, "true", &id, "sin_mean", mean).l(l).q(q).trial(t));
            per_q[qs.iter().position(|&x| x == q).unwrap_or(0)].push(s);
        }
        // Mean and range of each sine over the trials.
        for (qi, runs) in per_q.iter().enumerate() {
            let (q, l) = (qs[qi], sketch_size(&bc, qs[qi]));
            for i in 0..k {
                let col: Vec<f64> = runs.iter().map(|s| s[i]).collect();
                let mean = col.iter().sum::<f64>() / col.len() as f64;
                let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = col.iter().copied().fold(0.0, f64::max);
                let metric = format!("sin_{}", i + 1);
                for (name, v) in [("true_mean", mean), ("true_min", lo), ("true_max", hi)] {
                    rows.push(ResultRow::new(exp, name, &id, &metric, v).l(l).q(q));
                }
            }
        }
        let largest = |s: &Vec<f64>| s.iter().copied().fold(0.0, f64::max);
        for t in 0..cfg.trials {
            let per_trial: Vec<f64> = per_q.iter().map(|runs| largest(&runs[t])).collect();
            rows.push(ResultRow::new(exp, "true", &id, "argmin_q", qs[argmin(&per_trial)] as f64).trial(t));
        }
        let med: Vec<f64> = per_q.iter().map(|runs| median(&mut runs.iter().map(largest).collect::<Vec<_>>())).collect();
        rows.push(ResultRow::new(exp, "phi", &id, "argmin_q", qs[argmin(&phi)] as f64));
        rows.push(ResultRow::new(exp, "true_median", &id, "argmin_q", qs[argmin(&med)] as f64));
        series.push(Series {
            name: format!("phi, gap {gap}"),
            points: qs.iter().zip(&phi).map(|(&q, &v)| (q as f64, v)).collect(),
        });
        series.push(Series {
            name: format!("median max sine, gap {gap}"),
            points: qs.iter().zip(&med).map(|(&q, &v)| (q as f64, v)).collect(),
        });
    }
    let plot = Plot {
        title: format!("Budget {}k split between l and q, k={k}", cfg.alpha),
        x_label: "q".into(),
        y_label: "largest sine".into(),
        log_y: true,
        series,
    };
    Ok(Outcome { rows, diagnostics: Vec::new(), plot })
}

/// First index of the smallest value.
pub fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[best] {
            best = i;
        }
    }
    best
}
