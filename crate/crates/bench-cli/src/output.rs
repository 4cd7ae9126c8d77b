//! Result rows, the CSV writer and a minimal SVG line chart.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, Result};

pub const CSV_HEADER: [&str; 9] = ["experiment", "method", "matrix", "param_l", "param_q", "trial", "metric", "value", "nanos"];

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub method: String,
    pub matrix: String,
    pub param_l: Option<usize>,
    pub param_q: Option<usize>,
    pub trial: Option<usize>,
    pub metric: String,
    pub value: f64,
    pub nanos: Option<u128>,
}

impl ResultRow {
    pub fn new(experiment: &str, method: &str, matrix: &str, metric: &str, value: f64) -> Self {
        ResultRow {
            experiment: experiment.to_owned(),
            method: method.to_owned(),
            matrix: matrix.to_owned(),
            param_l: None,
            param_q: None,
            trial: None,
            metric: metric.to_owned(),
            value,
            nanos: None,
        }
    }

    pub fn l(mut self, l: usize) -> Self {
        self.param_l = Some(l);
        self
    }

    pub fn q(mut self, q: usize) -> Self {
        self.param_q = Some(q);
        self
    }

    pub fn trial(mut self, t: usize) -> Self {
        self.trial = Some(t);
        self
    }

    pub fn nanos(mut self, ns: u128) -> Self {
        self.nanos = Some(ns);
        self
    }

    fn record(&self) -> [String; 9] {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.experiment.clone(),
            self.method.clone(),
            self.matrix.clone(),
            opt(self.param_l),
            opt(self.param_q),
            opt(self.trial),
            self.metric.clone(),
            // Shortest round-trip form: locale free and deterministic.
            format!("{:?}", self.value),
            self.nanos.map(|n| n.to_string()).unwrap_or_default(),
        ]
    }
}

pub fn write_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    if let Some(bad) = rows.iter().find(|r| !r.value.is_finite()) {
        return Err(CliError::Io(format!("non-finite metric {} for {}", bad.metric, bad.method)));
    }
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record(r.record()).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(io)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(io)?;
        let opt = |i: usize| rec[i].parse::<usize>().ok();
        out.push(ResultRow {
            experiment: rec[0].to_owned(),
            method: rec[1].to_owned(),
            matrix: rec[2].to_owned(),
            param_l: opt(3),
            param_q: opt(4),
            trial: opt(5),
            metric: rec[6].to_owned(),
            value: rec[7].parse().map_err(|_| CliError::Io(format!("bad value {:?}", &rec[7])))?,
            nanos: rec[8].parse().ok(),
        });
    }
    Ok(out)
}

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

impl Plot {
    pub fn to_svg(&self) -> String {
        let (w, h, ml, mr, mt, mb) = (720.0, 440.0, 70.0, 190.0, 40.0, 50.0);
        let ty = |y: f64| if self.log_y { y.max(1e-300).log10() } else { y };
        let pts = self.series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && ty(p.1).is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(ty(y));
            y1 = y1.max(ty(y));
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 == x0 {
            x1 = x0 + 1.0;
        }
        if y1 == y0 {
            y1 = y0 + 1.0;
        }
        let px = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
        let py = |y: f64| h - mb - (ty(y) - y0) / (y1 - y0) * (h - mt - mb);
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, (w - mr + ml) / 2.0, esc(&self.title));
        let _ = writeln!(
            s,
            r#"<polyline points="{ml},{mt} {ml},{b} {r},{b}" fill="none" stroke="black"/>"#,
            b = h - mb,
            r = w - mr
        );
        for t in 0..=4 {
            let f = t as f64 / 4.0;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let ylab = if self.log_y { format!("1e{yv:.1}") } else { format!("{yv:.3}") };
            let yp = h - mb - f * (h - mt - mb);
            let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, px(xv), h - mb + 16.0, trim(xv));
            let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, ml - 6.0, yp + 4.0, ylab);
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (w - mr + ml) / 2.0, h - 12.0, esc(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            h / 2.0,
            h / 2.0,
            esc(&self.y_label)
        );
        for (i, series) in self.series.iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            let coords: Vec<String> = series
                .points
                .iter()
                .filter(|p| ty(p.1).is_finite())
                .map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y)))
                .collect();
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#, coords.join(" "));
            let ly = mt + 16.0 * i as f64;
            let lx = w - mr + 12.0;
            let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/>"#, lx + 18.0);
            let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 24.0, ly + 4.0, esc(&series.name));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn trim(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x:.3}")
    }
}

fn esc(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            ResultRow::new("cur_accuracy", "rand-lupp", "snn:m=3", "rel_fro", 0.1 + 0.2).l(20).trial(3).nanos(1234),
            ResultRow::new("cur_accuracy", "tsvd", "snn:m=3", "opt_fro", 1e-300).l(20),
        ];
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        write_csv(&p, &rows).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("experiment,method,matrix,param_l,param_q,trial,metric,value,nanos\n"));
        assert_eq!(read_csv(&p).unwrap(), rows);
        let bad = vec![ResultRow::new("e", "m", "x", "v", f64::NAN)];
        assert!(write_csv(&p, &bad).is_err());
    }

    #[test]
    fn svg_is_well_formed() {
        let plot = Plot {
            title: "a < b".into(),
            x_label: "l".into(),
            y_label: "error".into(),
            log_y: true,
            series: vec![Series { name: "s".into(), points: vec![(1.0, 1e-3), (2.0, 1e-2)] }],
        };
        let svg = plot.to_svg();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }
}
