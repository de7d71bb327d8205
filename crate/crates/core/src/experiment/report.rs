//! Result records and their CSV, JSON, text and SVG renderings.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Kind, Measure};
use crate::caseplan::{CasePlanConstants, CaseTrace};
use crate::error::{Error, Result};
use crate::montecarlo::{CircleDecorrelation, Estimate, SweepResult};
use crate::weights::{format_rational, Reading, Side, WeightCertificate};

pub const THETA_HEADER: &str = "m,n,I1,I2,theta_star,witness_s,witness_t,weight_i,weight_j,side";
pub const SWEEP_HEADER: &str = "experiment_id,delta,gap,stderr,n,seed,t_vectors,max_sample";
pub const INTEGRAL_HEADER: &str = "experiment_id,quantity,horizon,mean,stderr,n,seed,max_sample";
pub const AFFINE_HEADER: &str = "experiment_id,length,scale,correlation,main,gap,stderr,n,seed,noise_limited";
pub const CIRCLE_HEADER: &str =
    "experiment_id,length,value_re,value_im,main_re,main_im,gap_re,gap_im,coefficient_bound,l2_bound";

/// One ordered pair of the θ* table, rationals as `num/den` strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaRow {
    pub m: usize,
    pub n: usize,
    pub i1: Vec<usize>,
    pub i2: Vec<usize>,
    pub reading: Reading,
    pub theta_star: String,
    pub witness_s: Vec<String>,
    pub witness_t: Vec<String>,
    pub weight_i: usize,
    pub weight_j: usize,
    pub side: Side,
    pub separates: bool,
}

impl ThetaRow {
    pub fn from_certificate(c: &WeightCertificate) -> Self {
        ThetaRow {
            m: c.m,
            n: c.n,
            i1: c.i1.indices(),
            i2: c.i2.indices(),
            reading: c.reading,
            theta_star: format_rational(&c.theta_star),
            witness_s: c.witness_s.iter().map(format_rational).collect(),
            witness_t: c.witness_t.iter().map(format_rational).collect(),
            weight_i: c.achieving_weight.i,
            weight_j: c.achieving_weight.j,
            side: c.achieving_side,
            separates: c.separates(),
        }
    }
}

/// A scalar produced by an `integral` experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralRow {
    /// `joint`, `single_s`, `gap`, `mu_I{…}`, `product` or `haar`.
    pub quantity: String,
    pub horizon: Option<f64>,
    /// Flow parameters the quantity was read at.
    pub flows: Vec<Vec<f64>>,
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
    /// Absent for derived quantities.
    pub max_sample: Option<f64>,
}

impl IntegralRow {
    pub fn from_estimate(quantity: impl Into<String>, horizon: Option<f64>, flows: Vec<Vec<f64>>, e: &Estimate) -> Self {
        IntegralRow {
            quantity: quantity.into(),
            horizon,
            flows,
            mean: e.mean,
            stderr: e.stderr,
            n: e.n_samples,
            seed: e.seed,
            max_sample: Some(e.max_sample),
        }
    }
}

/// Comparison of the same quantity at horizons `T` and `T + 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stabilization {
    pub horizon_a: f64,
    pub horizon_b: f64,
    pub difference: f64,
    pub combined_stderr: f64,
    /// `|difference| ≤ 3·combined_stderr`.
    pub stable: bool,
}

impl Stabilization {
    pub fn compare(horizon_a: f64, a: (f64, f64), horizon_b: f64, b: (f64, f64)) -> Self {
        let difference = b.0 - a.0;
        let combined_stderr = a.1.hypot(b.1);
        Stabilization { horizon_a, horizon_b, difference, combined_stderr, stable: difference.abs() <= 3.0 * combined_stderr }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralReport {
    pub measure: Measure,
    pub rows: Vec<IntegralRow>,
    pub stabilization: Option<Stabilization>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub constants: Vec<CasePlanConstants>,
    pub traces: Vec<CaseTrace>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineRow {
    pub length: f64,
    pub scale: f64,
    pub correlation: Estimate,
    pub main: Estimate,
    pub gap: Estimate,
    pub noise_limited: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleRow {
    pub length: f64,
    pub result: CircleDecorrelation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "snake_case")]
pub enum Outcome {
    Theta(Vec<ThetaRow>),
    Sweep(SweepResult),
    Integral(IntegralReport),
    Case(CaseReport),
    Affine(Vec<AffineRow>),
    Circle(Vec<CircleRow>),
}

impl Outcome {
    pub fn kind(&self) -> Kind {
        match self {
            Outcome::Theta(_) => Kind::Theta,
            Outcome::Sweep(_) => Kind::Sweep,
            Outcome::Integral(_) => Kind::Integral,
            Outcome::Case(_) => Kind::Case,
            Outcome::Affine(_) => Kind::Affine,
            Outcome::Circle(_) => Kind::Circle,
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            Outcome::Theta(r) => r.is_empty(),
            Outcome::Sweep(s) => s.rows.is_empty(),
            Outcome::Integral(i) => i.rows.is_empty(),
            Outcome::Case(c) => c.traces.is_empty(),
            Outcome::Affine(r) => r.is_empty(),
            Outcome::Circle(r) => r.is_empty(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub id: String,
    pub seed: Option<u64>,
    /// Caveats worth keeping next to the numbers.
    pub notes: Vec<String>,
    pub outcome: Outcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
            Format::Text => "txt",
        }
    }
}

impl Report {
    /// The artifact formats written for this kind of result.
    pub fn formats(&self) -> &'static [Format] {
        match self.outcome {
            Outcome::Sweep(_) => &[Format::Csv, Format::Json, Format::Svg],
            Outcome::Case(_) => &[Format::Json, Format::Text],
            _ => &[Format::Csv, Format::Json],
        }
    }
}

/// Decimal with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_set(v: &[usize]) -> String {
    let inner: Vec<String> = v.iter().map(usize::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

fn csv_table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header.split(','))?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Internal(format!("csv: {e}"))
    }
}

pub fn render(report: &Report, format: Format) -> Result<String> {
    if report.outcome.is_empty() {
        return Err(Error::domain("nothing to report: the result set is empty"));
    }
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Internal(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => render_csv(report),
        Format::Svg => match &report.outcome {
            Outcome::Sweep(s) => Ok(sweep_svg(&report.id, s)),
            other => Err(Error::domain(format!("no SVG plot for {} results", other.kind()))),
        },
        Format::Text => match &report.outcome {
            Outcome::Case(c) => {
                let mut s = String::new();
                for (k, t) in c.traces.iter().enumerate() {
                    let _ = writeln!(s, "tuple {}", k + 1);
                    let _ = write!(s, "{t}");
                }
                Ok(s)
            }
            other => Err(Error::domain(format!("no text rendering for {} results", other.kind()))),
        },
    }
}

fn render_csv(report: &Report) -> Result<String> {
    let id = &report.id;
    match &report.outcome {
        Outcome::Theta(rows) => csv_table(
            THETA_HEADER,
            rows.iter().map(|r| {
                vec![
                    r.m.to_string(),
                    r.n.to_string(),
                    fmt_set(&r.i1),
                    fmt_set(&r.i2),
                    r.theta_star.clone(),
                    r.witness_s.join(" "),
                    r.witness_t.join(" "),
                    r.weight_i.to_string(),
                    r.weight_j.to_string(),
                    r.side.to_string(),
                ]
            }),
        ),
        Outcome::Sweep(s) => {
            let mut rows = Vec::with_capacity(s.rows.len());
            for r in &s.rows {
                let ts = serde_json::to_string(&r.t_vectors).map_err(|e| Error::Internal(e.to_string()))?;
                rows.push(vec![
                    id.clone(),
                    fmt_f64(r.delta),
                    fmt_f64(r.gap),
                    fmt_f64(r.stderr),
                    r.n.to_string(),
                    r.seed.to_string(),
                    ts,
                    fmt_f64(r.max_sample),
                ]);
            }
            csv_table(SWEEP_HEADER, rows)
        }
        Outcome::Integral(rep) => csv_table(
            INTEGRAL_HEADER,
            rep.rows.iter().map(|r| {
                vec![
                    id.clone(),
                    r.quantity.clone(),
                    r.horizon.map(fmt_f64).unwrap_or_default(),
                    fmt_f64(r.mean),
                    fmt_f64(r.stderr),
                    r.n.to_string(),
                    r.seed.to_string(),
                    r.max_sample.map(fmt_f64).unwrap_or_default(),
                ]
            }),
        ),
        Outcome::Affine(rows) => csv_table(
            AFFINE_HEADER,
            rows.iter().map(|r| {
                vec![
                    id.clone(),
                    fmt_f64(r.length),
                    fmt_f64(r.scale),
                    fmt_f64(r.correlation.mean),
                    fmt_f64(r.main.mean),
                    fmt_f64(r.gap.mean),
                    fmt_f64(r.gap.stderr),
                    r.gap.n_samples.to_string(),
                    r.gap.seed.to_string(),
                    r.noise_limited.to_string(),
                ]
            }),
        ),
        Outcome::Circle(rows) => csv_table(
            CIRCLE_HEADER,
            rows.iter().map(|r| {
                let c = &r.result;
                vec![
                    id.clone(),
                    fmt_f64(r.length),
                    fmt_f64(c.value.re),
                    fmt_f64(c.value.im),
                    fmt_f64(c.main.re),
                    fmt_f64(c.main.im),
                    fmt_f64(c.gap.re),
                    fmt_f64(c.gap.im),
                    fmt_f64(c.coefficient_bound),
                    fmt_f64(c.l2_bound),
                ]
            }),
        ),
        Outcome::Case(_) => Err(Error::domain("case traces are reported as JSON or text")),
    }
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

/// Log-linear plot of `|gap|` against `Δ` with `3·stderr` whiskers and the
/// fitted exponential as a straight line. Noise-limited rows are hollow.
pub fn sweep_svg(id: &str, s: &SweepResult) -> String {
    let xs: Vec<f64> = s.rows.iter().map(|r| r.delta).collect();
    let (mut x0, mut x1) = (xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    if x1 <= x0 {
        x0 -= 1.0;
        x1 += 1.0;
    }
    let mut logs: Vec<f64> = Vec::new();
    for r in &s.rows {
        for v in [r.gap.abs(), r.gap.abs() + 3.0 * r.stderr, r.stderr] {
            if v > 0.0 && v.is_finite() {
                logs.push(v.log10());
            }
        }
    }
    if let Some(f) = &s.fit {
        for x in [x0, x1] {
            let y = (f.intercept - f.fitted_eta * x) / std::f64::consts::LN_10;
            if y.is_finite() {
                logs.push(y);
            }
        }
    }
    let (mut y0, mut y1) = if logs.is_empty() {
        (-1.0, 0.0)
    } else {
        (logs.iter().copied().fold(f64::INFINITY, f64::min).floor(), logs.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil())
    };
    if y1 <= y0 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |ly: f64| TOP + (y1 - ly.clamp(y0, y1)) / (y1 - y0) * (H - TOP - BOTTOM);
    let ylog = |v: f64| if v > 0.0 { v.log10() } else { y0 };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<title>{}</title>"#, xml_escape(id));
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<g class="axes" stroke="black" fill="none"><path d="M{:.2} {:.2} V{:.2} H{:.2}"/></g>"#,
        LEFT,
        TOP,
        H - BOTTOM,
        W - RIGHT
    );
    let decades = (y1 - y0).round() as i64;
    for k in 0..=decades {
        let ly = y0 + k as f64;
        let y = py(ly);
        let _ = writeln!(
            out,
            r##"<g class="ytick"><line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{}</text></g>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            ly as i64
        );
    }
    for &x in &xs {
        let _ = writeln!(
            out,
            r#"<g class="xtick"><line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="black"/><text x="{0:.2}" y="{3:.2}" text-anchor="middle">{4}</text></g>"#,
            px(x),
            H - BOTTOM,
            H - BOTTOM + 5.0,
            H - BOTTOM + 18.0,
            x
        );
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Δ</text>"#, (LEFT + W - RIGHT) / 2.0, H - 10.0);
    let _ = writeln!(
        out,
        r#"<text x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">|gap|</text>"#,
        H / 2.0,
        H / 2.0
    );
    for r in &s.rows {
        let x = px(r.delta);
        let lo = ylog(r.gap.abs() - 3.0 * r.stderr);
        let hi = ylog(r.gap.abs() + 3.0 * r.stderr);
        let _ = writeln!(
            out,
            r#"<line class="whisker" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="gray"/>"#,
            py(lo),
            py(hi)
        );
    }
    for r in &s.rows {
        let fill = if r.noise_limited { "none" } else { "steelblue" };
        let _ = writeln!(
            out,
            r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="4" stroke="steelblue" fill="{fill}"/>"#,
            px(r.delta),
            py(ylog(r.gap.abs()))
        );
    }
    if let Some(f) = &s.fit {
        let ly = |x: f64| (f.intercept - f.fitted_eta * x) / std::f64::consts::LN_10;
        let _ = writeln!(
            out,
            r#"<line class="fit" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="firebrick" stroke-dasharray="6 3"/>"#,
            px(x0),
            py(ly(x0)),
            px(x1),
            py(ly(x1))
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" fill="firebrick">η = {:.4}</text>"#,
            W - RIGHT - 5.0,
            TOP + 14.0,
            f.fitted_eta
        );
    }
    out.push_str("</svg>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `bytes` to `dir/name` through a temporary file in `dir`.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
        return Err(Error::Config(format!("refusing to write artifact named '{name}'")));
    }
    std::fs::create_dir_all(dir)?;
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(&target).map_err(|e| Error::Io(e.error))?;
    Ok(target)
}

/// Renders `report` in `format` and writes `dir/<id>.<ext>`.
pub fn emit_report(report: &Report, format: Format, dir: &Path) -> Result<PathBuf> {
    let text = render(report, format)?;
    write_atomic(dir, &format!("{}.{}", report.id, format.extension()), text.as_bytes())
}

/// Renders every artifact first so a failure leaves no files behind.
pub fn emit_all(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    let rendered = report
        .formats()
        .iter()
        .map(|&f| Ok((f, render(report, f)?)))
        .collect::<Result<Vec<_>>>()?;
    rendered
        .into_iter()
        .map(|(f, text)| write_atomic(dir, &format!("{}.{}", report.id, f.extension()), text.as_bytes()))
        .collect()
}
