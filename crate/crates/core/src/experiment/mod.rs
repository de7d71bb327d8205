//! Config-driven experiment runs and their artifacts.
//!
//! [`run_experiment`] loads a TOML config, computes the result on a worker
//! pool and writes `<id>.csv` / `<id>.json` / `<id>.svg` / `<id>.txt` into
//! the config's output directory. Worker count never changes a number.

pub mod config;
pub mod report;

use std::path::{Path, PathBuf};

pub use config::{load_config, parse_config, read_tuple_file, ExperimentConfig, Kind, LoadedConfig, Measure};
pub use report::{emit_all, emit_report, render, Format, Outcome, Report};

use crate::caseplan::classify_case;
use crate::error::{Error, Result};
use crate::lattice::FlowParam;
use crate::montecarlo::{
    affine_mean_decorrelation, circle_mean_decorrelation, decay_sweep, decorrelation_gap, estimate_haar_integral,
    estimate_muI_integral, with_workers,
};
use crate::weights::theta_table;
use config::{admissible_sets, flows, AffineSettings, CaseSettings, IntegralSettings, SweepSettings};
use report::{AffineRow, CaseReport, CircleRow, IntegralReport, IntegralRow, Stabilization, ThetaRow};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "DIAGFLOW_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Process exit code for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::Domain(_)
        | Error::Dimension { .. }
        | Error::NotAdmissible(_)
        | Error::Invariant(_) => EXIT_CONFIG,
        Error::Reduction(_) | Error::Singular | Error::Numerical(_) | Error::Internal(_) | Error::Io(_) => {
            EXIT_NUMERICAL
        }
    }
}

/// Worker count from [`WORKERS_ENV`], defaulting to the available parallelism.
pub fn workers_from_env() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(k),
            _ => Err(Error::Config(format!("{WORKERS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|k| k.get()).unwrap_or(1)),
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Report,
    pub files: Vec<PathBuf>,
}

/// Loads, runs and writes artifacts. Nothing is written unless every
/// artifact renders.
pub fn run_experiment(config_path: &Path, workers: usize) -> Result<RunOutput> {
    let loaded = load_config(config_path)?;
    let report = with_workers(workers, || execute(&loaded))??;
    let files = emit_all(&report, &loaded.output_dir())?;
    Ok(RunOutput { report, files })
}

/// Computes the report for a loaded config without touching the disk
/// (beyond reading a case tuple file).
pub fn execute(loaded: &LoadedConfig) -> Result<Report> {
    let c = &loaded.config;
    let seed = c.seed.unwrap_or(0);
    let mut notes = Vec::new();
    let outcome = match c.kind {
        Kind::Theta => {
            let s = c.theta.as_ref().expect("validated");
            let certs = theta_table(s.m, s.n, s.reading)?;
            for cert in &certs {
                cert.verify()?;
            }
            Outcome::Theta(certs.iter().map(ThetaRow::from_certificate).collect())
        }
        Kind::Sweep => Outcome::Sweep(run_sweep(c.sweep.as_ref().expect("validated"), seed, &mut notes)?),
        Kind::Integral => Outcome::Integral(run_integral(c.integral.as_ref().expect("validated"), seed, &mut notes)?),
        Kind::Case => Outcome::Case(run_case(c.case.as_ref().expect("validated"), loaded, &mut notes)?),
        Kind::Affine => Outcome::Affine(run_affine(c.affine.as_ref().expect("validated"), seed)?),
        Kind::Circle => {
            let s = c.circle.as_ref().expect("validated");
            let rows = s
                .lengths
                .iter()
                .map(|&length| Ok(CircleRow { length, result: circle_mean_decorrelation(&s.phi, &s.psi, length)? }))
                .collect::<Result<Vec<_>>>()?;
            Outcome::Circle(rows)
        }
    };
    Ok(Report { id: c.id.clone(), seed: c.seed, notes, outcome })
}

fn run_sweep(s: &SweepSettings, seed: u64, notes: &mut Vec<String>) -> Result<crate::montecarlo::SweepResult> {
    let base = flows(s.m, s.n, &s.base)?;
    let direction = FlowParam::new(s.m, s.n, s.direction.clone())?;
    let result = decay_sweep(&s.observables, &base, &direction, &s.grid, s.samples, seed)?;
    let noisy = result.rows.iter().filter(|r| r.noise_limited).count();
    if noisy == result.rows.len() {
        notes.push("every row is noise-limited (|gap| ≤ 3·stderr)".into());
    } else if noisy > 0 {
        notes.push(format!("{noisy} of {} rows are noise-limited (|gap| ≤ 3·stderr)", result.rows.len()));
    }
    match &result.fit {
        None => notes.push("fewer than two rows rise above noise; no decay fit".into()),
        Some(f) if f.fit_stderr.is_none() => notes.push("decay fit uses only two rows; no standard error".into()),
        Some(_) => {}
    }
    Ok(result)
}

fn product_with_stderr(parts: &[(f64, f64)]) -> (f64, f64) {
    let mean = parts.iter().map(|p| p.0).product();
    let var: f64 = (0..parts.len())
        .map(|s| {
            let others: f64 = parts.iter().enumerate().filter(|&(q, _)| q != s).map(|(_, p)| p.0).product();
            (others * parts[s].1).powi(2)
        })
        .sum();
    (mean, var.sqrt())
}

fn run_integral(s: &IntegralSettings, seed: u64, notes: &mut Vec<String>) -> Result<IntegralReport> {
    let n = s.samples;
    let mut rows = Vec::new();
    let mut stabilization = None;
    match s.measure {
        config::Measure::Joint => {
            let ts = flows(s.m, s.n, &s.flows)?;
            let coords: Vec<Vec<f64>> = ts.iter().map(|t| t.coords().to_vec()).collect();
            if s.observables.len() == 1 {
                let e = crate::montecarlo::estimate_nu_integral(&s.observables[0], &ts[0], n, seed)?;
                rows.push(IntegralRow::from_estimate("joint", None, coords, &e));
            } else {
                let g = decorrelation_gap(&s.observables, &ts, n, seed)?;
                rows.push(IntegralRow::from_estimate("joint", None, coords.clone(), &g.joint));
                for (k, e) in g.singles.iter().enumerate() {
                    rows.push(IntegralRow::from_estimate(format!("single_{}", k + 1), None, vec![coords[k].clone()], e));
                }
                rows.push(IntegralRow {
                    quantity: "gap".into(),
                    horizon: None,
                    flows: coords,
                    mean: g.gap,
                    stderr: g.stderr,
                    n,
                    seed,
                    max_sample: None,
                });
                if g.noise_limited() {
                    notes.push("gap is noise-limited (|gap| ≤ 3·stderr)".into());
                }
            }
        }
        config::Measure::MuI => {
            let sets = admissible_sets(s.m, s.n, &s.sets)?;
            let mut horizons = vec![s.horizon];
            if s.stabilize {
                horizons.push(s.horizon + 2.0);
            }
            let mut products = Vec::new();
            for &h in &horizons {
                let mut parts = Vec::new();
                let mut all_flows = Vec::new();
                for (obs, set) in s.observables.iter().zip(&sets) {
                    let est = estimate_muI_integral(obs, set, h, n, seed)?;
                    let flow = est.flow.coords().to_vec();
                    parts.push((est.estimate.mean, est.estimate.stderr));
                    rows.push(IntegralRow::from_estimate(format!("mu_I{set}"), Some(h), vec![flow.clone()], &est.estimate));
                    all_flows.push(flow);
                }
                let (mean, stderr) = product_with_stderr(&parts);
                if sets.len() > 1 {
                    rows.push(IntegralRow {
                        quantity: "product".into(),
                        horizon: Some(h),
                        flows: all_flows,
                        mean,
                        stderr,
                        n,
                        seed,
                        max_sample: None,
                    });
                }
                products.push((mean, stderr));
            }
            notes.push("each μ_I integral is read off at the balanced translate with ⌊t⌋_I = T".into());
            if s.stabilize {
                stabilization = Some(Stabilization::compare(horizons[0], products[0], horizons[1], products[1]));
            }
        }
        config::Measure::Haar => {
            let mut horizons = vec![s.horizon];
            if s.stabilize {
                horizons.push(s.horizon + 2.0);
            }
            let mut means = Vec::new();
            for &h in &horizons {
                let e = estimate_haar_integral(&s.observables[0], s.m, s.n, h, n, seed)?;
                let flow = FlowParam::uniform_on(&crate::lattice::AdmissibleSet::full(s.m, s.n), h)?;
                rows.push(IntegralRow::from_estimate("haar", Some(h), vec![flow.coords().to_vec()], &e));
                means.push((e.mean, e.stderr));
            }
            if s.stabilize {
                stabilization = Some(Stabilization::compare(horizons[0], means[0], horizons[1], means[1]));
            }
        }
    }
    if let Some(st) = &stabilization {
        notes.push(format!(
            "T vs T+2 stabilization is a heuristic check: {}",
            if st.stable { "stable" } else { "NOT stable" }
        ));
    }
    Ok(IntegralReport { measure: s.measure, rows, stabilization })
}

fn run_case(s: &CaseSettings, loaded: &LoadedConfig, notes: &mut Vec<String>) -> Result<CaseReport> {
    let mut tuples = s.tuples.clone();
    if let Some(p) = &s.tuple_file {
        tuples.extend(read_tuple_file(&loaded.resolve(p))?);
    }
    let mut constants = Vec::with_capacity(tuples.len());
    let mut traces = Vec::with_capacity(tuples.len());
    for t in &tuples {
        let ts = flows(s.m, s.n, t)?;
        let k = s.constants(ts.len())?;
        traces.push(classify_case(&ts, &k)?);
        constants.push(k);
    }
    if s.c.is_none() && s.ell == 1 && s.delta == 1.0 {
        notes.push("ell = 1 and delta = 1 are nominal, for structural testing only".into());
    }
    Ok(CaseReport { constants, traces })
}

fn run_affine(s: &AffineSettings, seed: u64) -> Result<Vec<AffineRow>> {
    s.lengths
        .iter()
        .map(|&length| {
            let d = affine_mean_decorrelation(&s.phi, &s.psi, s.w, length, s.horizon, s.samples, seed, s.options())?;
            Ok(AffineRow {
                length,
                scale: d.scale,
                noise_limited: d.gap.mean.abs() <= 3.0 * d.gap.stderr,
                correlation: d.correlation,
                main: d.main,
                gap: d.gap,
            })
        })
        .collect()
}
