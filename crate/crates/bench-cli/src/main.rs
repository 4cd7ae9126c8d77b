use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use randskel::parallel::with_threads;
use randskel_cli::config::{read_config_file, Experiment, ExperimentConfig};
use randskel_cli::error::{CliError, Result};
use randskel_cli::experiments;

#[derive(Parser)]
#[command(name = "randskel", version, about = "Randomized skeletonization and canonical-angle experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// CUR error against the truncated SVD over a rank grid.
    CurAccuracy(Flags),
    /// Single-threaded timings of sketch application or pivoting.
    Timing {
        #[arg(value_enum)]
        what: TimingKind,
        #[command(flatten)]
        flags: Flags,
    },
    /// Canonical angles of a randomized SVD against every bound and estimate.
    Angles(Flags),
    /// Budget split between oversampling and power iterations.
    Balance(Flags),
}

#[derive(Clone, Copy, ValueEnum)]
enum TimingKind {
    Sketch,
    Pivot,
}

/// Every flag mirrors a config-file key; flags override the file.
#[derive(Args, Default)]
struct Flags {
    /// Key = value file with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// snn:..., snn-implicit:..., gaussian:..., step:... or csv:PATH.
    #[arg(long)]
    matrix: Option<String>,
    /// a:b:step or a comma list.
    #[arg(long)]
    ranks: Option<String>,
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Power iterations, a comma list.
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    sizes: Option<String>,
    /// Column count of the sketched matrix (timing sketch).
    #[arg(long)]
    width: Option<String>,
    #[arg(long)]
    repeats: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    gaps: Option<String>,
    /// Largest dimension that gets an exact SVD.
    #[arg(long)]
    max_exact: Option<String>,
}

impl Flags {
    fn settings(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("matrix", &self.matrix),
            ("ranks", &self.ranks),
            ("methods", &self.methods),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("q", &self.q),
            ("out", &self.out),
            ("k", &self.k),
            ("sizes", &self.sizes),
            ("width", &self.width),
            ("repeats", &self.repeats),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("gaps", &self.gaps),
            ("max_exact", &self.max_exact),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_owned(), v.clone())))
            .collect()
    }
}

fn resolve(experiment: Experiment, flags: &Flags) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults(experiment);
    if let Some(path) = &flags.config {
        cfg.apply(&read_config_file(path)?)?;
    }
    cfg.apply(&flags.settings())?;
    Ok(cfg)
}

fn threads() -> Result<usize> {
    match std::env::var("RANDSKEL_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("RANDSKEL_THREADS={v:?} is not a thread count"))),
        Err(_) => Ok(0),
    }
}

fn run(cli: Cli) -> Result<()> {
    let (experiment, flags) = match &cli.command {
        Command::CurAccuracy(f) => (Experiment::CurAccuracy, f),
        Command::Timing { what: TimingKind::Sketch, flags } => (Experiment::TimingSketch, flags),
        Command::Timing { what: TimingKind::Pivot, flags } => (Experiment::TimingPivot, flags),
        Command::Angles(f) => (Experiment::Angles, f),
        Command::Balance(f) => (Experiment::Balance, f),
    };
    let cfg = resolve(experiment, flags)?;
    let written = with_threads(threads()?, || experiments::run(&cfg))?;
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
