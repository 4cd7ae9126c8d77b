//! Experiment configuration: defaults per subcommand, a flat `key = value`
//! file mirroring the flags, and flag overrides on top.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    CurAccuracy,
    TimingSketch,
    TimingPivot,
    Angles,
    Balance,
}

impl Experiment {
    /// Identifier used in CSV rows and output file names.
    pub fn id(self) -> &'static str {
        match self {
            Experiment::CurAccuracy => "cur_accuracy",
            Experiment::TimingSketch => "timing_sketch",
            Experiment::TimingPivot => "timing_pivot",
            Experiment::Angles => "angles",
            Experiment::Balance => "balance",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    RandLupp,
    RandLupp1piter,
    RandCpqr,
    RandCpqr1piter,
    RsvdDeim,
    RsvdLs,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::RandLupp,
        Method::RandLupp1piter,
        Method::RandCpqr,
        Method::RandCpqr1piter,
        Method::RsvdDeim,
        Method::RsvdLs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::RandLupp => "rand-lupp",
            Method::RandLupp1piter => "rand-lupp-1piter",
            Method::RandCpqr => "rand-cpqr",
            Method::RandCpqr1piter => "rand-cpqr-1piter",
            Method::RsvdDeim => "rsvd-deim",
            Method::RsvdLs => "rsvd-ls",
        }
    }
}

impl FromStr for Method {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| CliError::UnknownMethod(s.to_owned()))
    }
}

/// Every key the config file and the flags understand.
pub const KEYS: [&str; 16] = [
    "matrix", "ranks", "methods", "trials", "seed", "q", "out", "k", "sizes", "width", "repeats", "alpha", "beta",
    "gamma", "gaps", "max_exact",
];

/// Fully resolved settings for one run. Fields a subcommand does not use
/// keep their defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub matrix: String,
    pub ranks: Vec<usize>,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub seed: u64,
    pub q: Vec<usize>,
    pub out: PathBuf,
    pub k: usize,
    pub sizes: Vec<usize>,
    pub width: usize,
    pub repeats: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub gaps: Vec<f64>,
    /// Largest dimension for which an exact SVD is computed.
    pub max_exact: usize,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let base = ExperimentConfig {
            experiment,
            matrix: String::new(),
            ranks: Vec::new(),
            methods: Method::ALL.to_vec(),
            trials: 1,
            seed: 0,
            q: vec![0],
            out: PathBuf::from("."),
            k: 50,
            sizes: Vec::new(),
            width: 256,
            repeats: 5,
            alpha: 16.0,
            beta: 32.0,
            gamma: 1.05,
            gaps: vec![1.01, 1.5],
            max_exact: 2000,
        };
        match experiment {
            Experiment::CurAccuracy => ExperimentConfig {
                matrix: "snn:m=300,n=300,a=2,r1=100,density=0.001".into(),
                ranks: (20..=100).step_by(20).collect(),
                trials: 20,
                ..base
            },
            Experiment::TimingSketch => ExperimentConfig {
                ranks: vec![64, 128, 256],
                sizes: vec![1024, 2048, 4096],
                ..base
            },
            Experiment::TimingPivot => ExperimentConfig {
                ranks: vec![100, 200, 400],
                sizes: vec![1000, 2000],
                ..base
            },
            Experiment::Angles => ExperimentConfig {
                matrix: "gaussian:m=500,n=500,profile=slow,r1=20".into(),
                ranks: vec![80, 200],
                q: vec![0, 1],
                ..base
            },
            Experiment::Balance => ExperimentConfig { k: 10, trials: 5, q: Vec::new(), ..base },
        }
    }

    /// Applies `key = value` settings over the current values.
    pub fn apply(&mut self, settings: &BTreeMap<String, String>) -> Result<()> {
        for (key, value) in settings {
            let v = value.as_str();
            match key.as_str() {
                "matrix" => self.matrix = v.to_owned(),
                "ranks" => self.ranks = parse_grid(v)?,
                "methods" => self.methods = v.split(',').map(|m| m.trim().parse()).collect::<Result<_>>()?,
                "trials" => self.trials = parse(key, v)?,
                "seed" => self.seed = parse(key, v)?,
                "q" => self.q = parse_list(key, v)?,
                "out" => self.out = PathBuf::from(v),
                "k" => self.k = parse(key, v)?,
                "sizes" => self.sizes = parse_grid(v)?,
                "width" => self.width = parse(key, v)?,
                "repeats" => self.repeats = parse(key, v)?,
                "alpha" => self.alpha = parse(key, v)?,
                "beta" => self.beta = parse(key, v)?,
                "gamma" => self.gamma = parse(key, v)?,
                "gaps" => self.gaps = parse_list(key, v)?,
                "max_exact" => self.max_exact = parse(key, v)?,
                other => return Err(CliError::config(format!("unknown key {other:?}"))),
            }
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(CliError::config("trials must be at least 1"));
        }
        if self.repeats == 0 {
            return Err(CliError::config("repeats must be at least 1"));
        }
        for (name, grid) in [("ranks", &self.ranks), ("sizes", &self.sizes)] {
            if grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::config(format!("{name} must be strictly increasing")));
            }
            if grid.contains(&0) {
                return Err(CliError::config(format!("{name} must be positive")));
            }
        }
        if self.methods.is_empty() {
            return Err(CliError::config("methods must not be empty"));
        }
        Ok(())
    }

    /// The settings as a config file that [`read_config_file`] reads back.
    pub fn to_config_text(&self) -> String {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        let _ = writeln!(s, "matrix = {}", self.matrix);
        let _ = writeln!(s, "ranks = {}", join(&self.ranks));
        let methods: Vec<&str> = self.methods.iter().map(|m| m.name()).collect();
        let _ = writeln!(s, "methods = {}", methods.join(","));
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "q = {}", join(&self.q));
        let _ = writeln!(s, "out = {}", self.out.display());
        let _ = writeln!(s, "k = {}", self.k);
        let _ = writeln!(s, "sizes = {}", join(&self.sizes));
        let _ = writeln!(s, "width = {}", self.width);
        let _ = writeln!(s, "repeats = {}", self.repeats);
        let _ = writeln!(s, "alpha = {}", self.alpha);
        let _ = writeln!(s, "beta = {}", self.beta);
        let _ = writeln!(s, "gamma = {}", self.gamma);
        let gaps: Vec<String> = self.gaps.iter().map(|g| g.to_string()).collect();
        let _ = writeln!(s, "gaps = {}", gaps.join(","));
        let _ = writeln!(s, "max_exact = {}", self.max_exact);
        s
    }
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| CliError::config(format!("bad value {v:?} for {key}")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| parse(key, x)).collect()
}

/// `a:b:step` (inclusive of b when it lies on the grid) or a comma list.
pub fn parse_grid(v: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = v.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step): (usize, usize, usize) = (parse("grid", a)?, parse("grid", b)?, parse("grid", step)?);
            if step == 0 || b < a {
                return Err(CliError::config(format!("bad grid {v:?}")));
            }
            Ok((a..=b).step_by(step).collect())
        }
        [_] => parse_list("grid", v),
        _ => Err(CliError::config(format!("bad grid {v:?}, expected a:b:step or a list"))),
    }
}

/// Reads `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("line {}: expected key = value", n + 1)))?;
        let k = k.trim().replace('-', "_");
        if !KEYS.contains(&k.as_str()) {
            return Err(CliError::config(format!("line {}: unknown key {k:?}", n + 1)));
        }
        out.insert(k, v.trim().to_owned());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("20:100:20").unwrap(), vec![20, 40, 60, 80, 100]);
        assert_eq!(parse_grid("80,200").unwrap(), vec![80, 200]);
        assert_eq!(parse_grid("5:9:3").unwrap(), vec![5, 8]);
        assert!(parse_grid("5:1:1").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn round_trip_through_text() {
        let mut c = ExperimentConfig::defaults(Experiment::Angles);
        c.seed = 17;
        c.gaps = vec![1.25];
        let mut back = ExperimentConfig::defaults(Experiment::Angles);
        back.apply(&parse_config_text(&c.to_config_text()).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_settings() {
        let mut c = ExperimentConfig::defaults(Experiment::CurAccuracy);
        let bad = |k: &str, v: &str| BTreeMap::from([(k.to_owned(), v.to_owned())]);
        assert!(matches!(c.apply(&bad("methods", "rand-lupp,magic")), Err(CliError::UnknownMethod(_))));
        assert!(c.clone().apply(&bad("ranks", "40,20")).is_err());
        assert!(c.clone().apply(&bad("trials", "0")).is_err());
        assert!(c.clone().apply(&bad("colour", "red")).is_err());
        assert!(parse_config_text("trials 3").is_err());
        assert!(parse_config_text("# comment\n\nseed = 4 # trailing\n").unwrap()["seed"] == "4");
    }
}
