pub mod angles;
pub mod balance;
pub mod cur_accuracy;
pub mod timing;

use std::path::PathBuf;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::output::{write_csv, Plot, ResultRow};

pub struct Outcome {
    pub rows: Vec<ResultRow>,
    /// Secondary metrics, written next to the main CSV with the same schema.
    pub diagnostics: Vec<ResultRow>,
    pub plot: Plot,
}

/// Median of a slice (sorts in place); NaN for an empty slice.
pub fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn compute(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::CurAccuracy => cur_accuracy::run(cfg),
        Experiment::TimingSketch => timing::run_sketch(cfg),
        Experiment::TimingPivot => timing::run_pivot(cfg),
        Experiment::Angles => angles::run(cfg),
        Experiment::Balance => balance::run(cfg),
    }
}

/// Runs the experiment and writes `<id>.csv`, `<id>_diagnostics.csv` (when
/// there are any) and `<id>.svg` under `cfg.out`. Returns the written paths.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let outcome = compute(cfg)?;
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::Io(format!("{}: {e}", cfg.out.display())))?;
    let id = cfg.experiment.id();
    let mut written = Vec::new();
    let csv = cfg.out.join(format!("{id}.csv"));
    write_csv(&csv, &outcome.rows)?;
    written.push(csv);
    if !outcome.diagnostics.is_empty() {
        let p = cfg.out.join(format!("{id}_diagnostics.csv"));
        write_csv(&p, &outcome.diagnostics)?;
        written.push(p);
    }
    let svg = cfg.out.join(format!("{id}.svg"));
    std::fs::write(&svg, outcome.plot.to_svg()).map_err(|e| CliError::Io(format!("{}: {e}", svg.display())))?;
    written.push(svg);
    Ok(written)
}
