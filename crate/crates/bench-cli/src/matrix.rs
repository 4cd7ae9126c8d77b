//! `--matrix` specs: `snn:...`, `snn-implicit:...`, `gaussian:...`,
//! `step:...` and `csv:PATH`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use randskel::linalg::{singular_values, spectral_norm, spectral_norm_estimate, svd_thin};
use randskel::testmat::{self, gen_gaussian_spectrum, gen_snn, snn_weights, ImplicitSnnOperator, SnnParams, SpectrumProfile};
use randskel::{DenseMatrix, LinearOperator};

use crate::error::{Check, CliError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum MatrixSpec {
    /// SNN with weights `a/i` up to r1 and `1/i` after, rank r.
    Snn { m: usize, n: usize, r: usize, a: f64, r1: usize, density: f64, implicit: bool },
    Gaussian { m: usize, n: usize, profile: SpectrumProfile },
    /// Square step-spectrum matrix of size `(1 + beta) k`, tail level 1.
    Step { k: usize, beta: usize, gap: f64 },
    Csv(PathBuf),
}

fn fields(body: &str) -> Result<BTreeMap<&str, &str>> {
    let mut out = BTreeMap::new();
    for part in body.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("matrix field {part:?} is not key=value")))?;
        out.insert(k.trim(), v.trim());
    }
    Ok(out)
}

fn take<T: std::str::FromStr>(f: &mut BTreeMap<&str, &str>, key: &str, default: Option<T>) -> Result<T> {
    match f.remove(key) {
        Some(v) => v.parse().map_err(|_| CliError::config(format!("bad matrix field {key}={v}"))),
        None => default.ok_or_else(|| CliError::config(format!("matrix spec needs {key}="))),
    }
}

fn no_leftovers(f: &BTreeMap<&str, &str>) -> Result<()> {
    match f.keys().next() {
        Some(k) => Err(CliError::config(format!("unknown matrix field {k:?}"))),
        None => Ok(()),
    }
}

impl std::str::FromStr for MatrixSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        if kind == "csv" {
            return Ok(MatrixSpec::Csv(PathBuf::from(body)));
        }
        let mut f = fields(body)?;
        let spec = match kind {
            "snn" | "snn-implicit" => {
                let implicit = kind == "snn-implicit";
                let m = take(&mut f, "m", Some(if implicit { 4096 } else { 300 }))?;
                let n = take(&mut f, "n", Some(m))?;
                let r = take(&mut f, "r", Some(if implicit { 100 } else { m.min(n) }))?;
                let a = take(&mut f, "a", Some(2.0))?;
                let r1 = take(&mut f, "r1", Some(100.min(r)))?;
                let density = take(&mut f, "density", Some(testmat::DEFAULT_DENSITY))?;
                if r == 0 || r > m.min(n) {
                    return Err(CliError::config(format!("SNN rank r={r} must be in 1..=min(m, n)")));
                }
                MatrixSpec::Snn { m, n, r, a, r1, density, implicit }
            }
            "gaussian" => {
                let m = take(&mut f, "m", Some(200))?;
                let n = take(&mut f, "n", Some(m))?;
                let r1 = take(&mut f, "r1", Some(20))?;
                let profile = match take::<String>(&mut f, "profile", Some("slow".into()))?.as_str() {
                    "slow" => SpectrumProfile::SlowDecay { r1 },
                    "fast" => SpectrumProfile::FastDecay { r1 },
                    other => return Err(CliError::config(format!("unknown profile {other:?} (slow|fast)"))),
                };
                MatrixSpec::Gaussian { m, n, profile }
            }
            "step" => MatrixSpec::Step {
                k: take(&mut f, "k", Some(10))?,
                beta: take(&mut f, "beta", Some(32))?,
                gap: take(&mut f, "gap", Some(1.5))?,
            },
            other => return Err(CliError::config(format!("unknown matrix kind {other:?}"))),
        };
        no_leftovers(&f)?;
        Ok(spec)
    }
}

/// Exact factors, when the generator knows them.
#[derive(Clone, Debug)]
pub struct Exact {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

pub enum Data {
    Dense(DenseMatrix),
    Implicit(ImplicitSnnOperator),
}

pub struct TestMatrix {
    /// Canonical spec string, used as the `matrix` CSV column.
    pub id: String,
    pub data: Data,
    pub exact: Option<Exact>,
}

impl TestMatrix {
    pub fn generate(spec: &MatrixSpec, seed: u64) -> Result<Self> {
        let (data, exact, id) = match spec {
            MatrixSpec::Snn { m, n, r, a, r1, density, implicit } => {
                let params = SnnParams { m: *m, n: *n, s: snn_weights(*r, *a, *r1), density: *density, seed };
                let op = gen_snn(params).check("SNN generation")?;
                let kind = if *implicit { "snn-implicit" } else { "snn" };
                let id = format!("{kind}:m={m},n={n},r={r},a={a},r1={r1},density={density}");
                if *implicit {
                    (Data::Implicit(op), None, id)
                } else {
                    (Data::Dense(op.densify()), None, id)
                }
            }
            MatrixSpec::Gaussian { m, n, profile } => {
                let sm = gen_gaussian_spectrum(*m, *n, profile, seed).check("spectrum generation")?;
                let name = match profile {
                    SpectrumProfile::SlowDecay { r1 } => format!("slow,r1={r1}"),
                    SpectrumProfile::FastDecay { r1 } => format!("fast,r1={r1}"),
                    _ => "explicit".into(),
                };
                let exact = Exact { u: sm.u, sigma: sm.sigma, v: sm.v };
                (Data::Dense(sm.a), Some(exact), format!("gaussian:m={m},n={n},profile={name}"))
            }
            MatrixSpec::Step { k, beta, gap } => {
                let r = testmat::step_size(*k, *beta);
                let sm = gen_gaussian_spectrum(r, r, &SpectrumProfile::step(*k, *gap), seed).check("step generation")?;
                let exact = Exact { u: sm.u, sigma: sm.sigma, v: sm.v };
                (Data::Dense(sm.a), Some(exact), format!("step:k={k},beta={beta},gap={gap}"))
            }
            MatrixSpec::Csv(path) => {
                let a = testmat::load_csv(path).check("CSV load")?;
                if a.rows() == 0 || a.cols() == 0 {
                    return Err(CliError::config(format!("{} holds no data", path.display())));
                }
                (Data::Dense(a), None, format!("csv:{}", path.display()))
            }
        };
        Ok(TestMatrix { id, data, exact })
    }

    pub fn op(&self) -> &dyn LinearOperator {
        match &self.data {
            Data::Dense(a) => a,
            Data::Implicit(op) => op,
        }
    }

    pub fn dense(&self) -> Option<&DenseMatrix> {
        match &self.data {
            Data::Dense(a) => Some(a),
            Data::Implicit(_) => None,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.op().rows(), self.op().cols())
    }

    /// All singular values (zeros beyond the rank omitted for implicit SNN).
    pub fn singular_values(&self, cap: usize) -> Result<Vec<f64>> {
        if let Some(e) = &self.exact {
            return Ok(e.sigma.clone());
        }
        match &self.data {
            Data::Implicit(op) => Ok(op.svd().check("exact SVD")?.sigma),
            Data::Dense(a) => {
                self.check_cap(cap)?;
                singular_values(a).check("exact SVD")
            }
        }
    }

    /// Exact factors, computing an SVD for inputs that do not carry them.
    pub fn exact(&self, cap: usize) -> Result<Exact> {
        if let Some(e) = &self.exact {
            return Ok(e.clone());
        }
        let s = match &self.data {
            Data::Implicit(op) => op.svd().check("exact SVD")?,
            Data::Dense(a) => {
                self.check_cap(cap)?;
                svd_thin(a).check("exact SVD")?
            }
        };
        Ok(Exact { u: s.u, sigma: s.sigma, v: s.v })
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        let (rows, cols) = self.shape();
        if rows.max(cols) > cap {
            return Err(CliError::MatrixTooLarge { rows, cols, cap });
        }
        Ok(())
    }

    pub fn fro_norm(&self) -> f64 {
        match &self.data {
            Data::Dense(a) => a.fro_norm(),
            Data::Implicit(op) => op.fro_norm(),
        }
    }

    /// Frobenius and spectral norms of `A - B` for `B = left * right`,
    /// streamed in row blocks so implicit operators are never densified
    /// whole. The spectral norm is exact up to `cap`, estimated above it.
    pub fn residual_norms(&self, left: &DenseMatrix, right: &DenseMatrix, cap: usize, seed: u64) -> Result<(f64, f64)> {
        let (m, n) = self.shape();
        if let Some(a) = self.dense() {
            if m.max(n) <= cap {
                let res = a.sub(&left.matmul(right));
                return Ok((res.fro_norm(), spectral_norm(&res).check("residual norm")?));
            }
        }
        let op = self.op();
        let block = 256;
        let mut fro2 = 0.0;
        for start in (0..m).step_by(block) {
            let idx: Vec<usize> = (start..(start + block).min(m)).collect();
            let res = op.rows_of(&idx).sub(&left.select_rows(&idx).matmul(right));
            fro2 += res.data().iter().map(|x| x * x).sum::<f64>();
        }
        let apply = |v: &[f64]| {
            let av = op.matvec(v);
            let bv = left.matvec(&right.matvec(v));
            av.iter().zip(&bv).map(|(x, y)| x - y).collect()
        };
        let apply_t = |w: &[f64]| {
            let av = op.matvec_adjoint(w);
            let bv = right.t_matvec(&left.t_matvec(w));
            av.iter().zip(&bv).map(|(x, y)| x - y).collect()
        };
        let spec = spectral_norm_estimate(apply, apply_t, n, 40, seed).check("residual norm estimate")?;
        Ok((fro2.sqrt(), spec))
    }
}
