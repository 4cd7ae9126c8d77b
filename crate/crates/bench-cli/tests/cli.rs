use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use randskel::angles::canonical_angles;
use randskel::rangefinder::randomized_svd;
use randskel::rng::derive_seed;
use randskel::sketch::EmbeddingKind;
use randskel::testmat::{gen_gaussian_spectrum, SpectrumProfile};
use randskel_cli::config::{parse_config_text, Experiment, ExperimentConfig};
use randskel_cli::experiments::{self, compute};
use randskel_cli::output::{read_csv, ResultRow};

fn cfg(experiment: Experiment, settings: &[(&str, &str)]) -> ExperimentConfig {
    let mut c = ExperimentConfig::defaults(experiment);
    let map: BTreeMap<String, String> = settings.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    c.apply(&map).unwrap();
    c
}

fn bin(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_randskel"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("RANDSKEL_THREADS")
        .output()
        .unwrap()
}

#[test]
fn cur_row_accounting_and_baseline() {
    let c = cfg(
        Experiment::CurAccuracy,
        &[
            ("matrix", "gaussian:m=80,n=60,profile=fast,r1=5"),
            ("ranks", "5:15:5"),
            ("methods", "rand-lupp,rsvd-deim"),
            ("trials", "3"),
        ],
    );
    let out = compute(&c).unwrap();
    assert_eq!(out.rows.len(), 2 * 3 * 3 + 3);
    // Eckart-Young against the generator's profile.
    let sigma = SpectrumProfile::FastDecay { r1: 5 }.values(60);
    let total: f64 = sigma.iter().map(|s| s * s).sum();
    for l in [5usize, 10, 15] {
        let want = (sigma[l..].iter().map(|s| s * s).sum::<f64>() / total).sqrt();
        let got = out.rows.iter().find(|r| r.metric == "opt_fro" && r.param_l == Some(l)).unwrap().value;
        assert!((got - want).abs() <= 1e-10 * want, "l={l}: {got} vs {want}");
        for r in out.rows.iter().filter(|r| r.metric == "rel_fro" && r.param_l == Some(l)) {
            assert!(r.value >= got * (1.0 - 1e-10) && r.nanos.is_some());
        }
    }
}

fn metric_columns(rows: &[ResultRow]) -> Vec<(String, String, Option<usize>, Option<usize>, Option<usize>, String, u64)> {
    rows.iter()
        .map(|r| {
            (r.method.clone(), r.matrix.clone(), r.param_l, r.param_q, r.trial, r.metric.clone(), r.value.to_bits())
        })
        .collect()
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let settings = [
        ("matrix", "snn:m=120,n=100,r=60,r1=20"),
        ("ranks", "10,20"),
        ("trials", "2"),
    ];
    let mut first = None;
    for threads in [1, 0] {
        let mut c = cfg(Experiment::CurAccuracy, &settings);
        c.out = dir.path().join(format!("t{threads}"));
        randskel::parallel::with_threads(threads, || experiments::run(&c)).unwrap();
        let rows = read_csv(&c.out.join("cur_accuracy.csv")).unwrap();
        let cols = metric_columns(&rows);
        match &first {
            None => first = Some(cols),
            Some(f) => assert_eq!(f, &cols),
        }
    }
    let a = compute(&cfg(Experiment::Balance, &[("trials", "2")])).unwrap();
    let b = compute(&cfg(Experiment::Balance, &[("trials", "2")])).unwrap();
    assert_eq!(metric_columns(&a.rows), metric_columns(&b.rows));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = bin(&["cur-accuracy", "--methods", "rand-lupp,nope"], d);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope"));
    assert_eq!(bin(&["cur-accuracy", "--ranks", "20,10"], d).status.code(), Some(2));
    assert_eq!(bin(&["cur-accuracy", "--trials", "0"], d).status.code(), Some(2));
    let o = bin(&["angles", "--matrix", "gaussian:m=120,n=120", "--max-exact", "100"], d);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("too large"));

    let zeros = d.join("zeros.csv");
    std::fs::write(&zeros, "0,0,0\n0,0,0\n0,0,0\n0,0,0\n").unwrap();
    let spec = format!("csv:{}", zeros.display());
    let o = bin(&["angles", "--matrix", &spec, "--k", "1", "--ranks", "2"], d);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("angle bounds"));

    let o = bin(&["balance", "--trials", "1", "--gaps", "1.5", "--k", "4"], d);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.join("balance.csv").exists() && d.join("balance.svg").exists());
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# balance\ntrials = 1\nk = 4\ngaps = 1.01\nseed = 3\n").unwrap();
    let o = bin(&["balance", "--config", conf.to_str().unwrap(), "--gaps", "1.5"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&dir.path().join("balance.csv")).unwrap();
    assert!(rows.iter().all(|r| r.matrix == "step:k=4,beta=32,gap=1.5"));
    assert!(rows.iter().filter(|r| r.metric == "sin_max").all(|r| r.trial == Some(0)));

    let back = parse_config_text(&cfg(Experiment::Angles, &[("seed", "9")]).to_config_text()).unwrap();
    assert_eq!(back["seed"], "9");
}

#[test]
fn timing_output_is_sorted_and_single_repeat_works() {
    let c = cfg(Experiment::TimingPivot, &[("sizes", "60,90"), ("ranks", "10,20"), ("repeats", "1")]);
    let out = compute(&c).unwrap();
    assert_eq!(out.rows.len(), 3 * 2 * 2);
    let keys: Vec<(String, String, Option<usize>)> =
        out.rows.iter().map(|r| (r.method.clone(), r.matrix.clone(), r.param_l)).collect();
    let order = ["cpqr", "deim", "lupp"];
    for w in keys.windows(2) {
        let size = |m: &str| m.split(['=', ',']).nth(1).unwrap().parse::<usize>().unwrap();
        let pos = |m: &str| order.iter().position(|&o| o == m).unwrap();
        assert!((pos(&w[0].0), size(&w[0].1), w[0].2) < (pos(&w[1].0), size(&w[1].1), w[1].2));
    }
    for r in &out.rows {
        assert_eq!(r.value, r.nanos.unwrap() as f64 * 1e-9);
    }

    let c = cfg(Experiment::TimingSketch, &[("sizes", "128"), ("ranks", "8,16"), ("width", "20"), ("repeats", "1")]);
    let out = compute(&c).unwrap();
    assert_eq!(out.rows.len(), 3 * 2);
    assert!(out.rows.windows(2).all(|w| (&w[0].method, w[0].param_l) < (&w[1].method, w[1].param_l)));
}

#[test]
fn balance_trends() {
    let out = compute(&cfg(Experiment::Balance, &[])).unwrap();
    let phi: Vec<&ResultRow> = out.rows.iter().filter(|r| r.metric == "phi").collect();
    assert!(phi.iter().all(|r| r.value > 0.0 && r.value < 1.0));
    let argmin = |method: &str, gap: &str| -> Vec<f64> {
        out.rows
            .iter()
            .filter(|r| r.method == method && r.metric == "argmin_q" && r.matrix.ends_with(gap))
            .map(|r| r.value)
            .collect()
    };
    assert_eq!(argmin("phi", "gap=1.01"), vec![0.0]);
    let max_q = phi.iter().filter(|r| r.matrix.ends_with("gap=1.5")).filter_map(|r| r.param_q).max().unwrap();
    assert_eq!(argmin("phi", "gap=1.5"), vec![max_q as f64]);
    for gap in ["gap=1.01", "gap=1.5"] {
        let want = argmin("phi", gap)[0];
        let hits = argmin("true", gap).iter().filter(|&&q| q == want).count();
        assert!(hits >= 4, "{gap}: {hits} of 5");
    }
}

#[test]
fn angle_series_are_consistent() {
    let c = cfg(
        Experiment::Angles,
        &[
            ("matrix", "gaussian:m=90,n=70,profile=fast,r1=4"),
            ("k", "6"),
            ("ranks", "12,24"),
            ("q", "0,1"),
            ("trials", "2"),
        ],
    );
    let out = compute(&c).unwrap();
    let sm = gen_gaussian_spectrum(90, 70, &SpectrumProfile::FastDecay { r1: 4 }, c.seed).unwrap();
    let series = |method: &str, l: usize, q: usize, t: usize| -> Vec<f64> {
        out.rows
            .iter()
            .filter(|r| r.method == method && r.param_l == Some(l) && r.param_q == Some(q) && r.trial == Some(t))
            .map(|r| r.value)
            .collect()
    };
    for l in [12, 24] {
        for q in [0, 1] {
            for t in 0..2 {
                // Independent recomputation of the true-angle series.
                let s = randomized_svd(&sm.a, l, q, derive_seed(c.seed, t as u64), EmbeddingKind::Gaussian).unwrap();
                let want = canonical_angles(&s.u_hat, &sm.u.column_range(0, 6)).unwrap().sines;
                assert_eq!(series("true:left", l, q, t), want);
                for side in ["left", "right"] {
                    let truth = series(&format!("true:{side}"), l, q, t);
                    assert_eq!(truth.len(), 6);
                    for name in ["posterior_simple_sigma", "posterior_gap_sigma", "reference"] {
                        let b = series(&format!("{name}:{side}"), l, q, t);
                        assert!(
                            b.is_empty() && name == "posterior_gap_sigma" || b.len() == 6,
                            "{name} missing"
                        );
                        for (x, y) in truth.iter().zip(&b) {
                            assert!(x <= &(y + 1e-10), "{name}:{side} l={l} q={q}: {x} > {y}");
                        }
                    }
                }
            }
        }
    }
    let csv_rows = out.rows.iter().filter(|r| r.metric.starts_with("sin_")).count();
    assert_eq!(csv_rows % 6, 0);
}
