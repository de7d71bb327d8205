//! TOML experiment configs.
//!
//! Every config names its `kind` at the top level and carries the matching
//! settings table:
//!
//! ```toml
//! id = "siegel-sweep"
//! kind = "sweep"
//! seed = 2024
//! output_dir = "out"
//!
//! [sweep]
//! m = 1
//! n = 1
//! samples = 100000
//! base = [[3.0, 3.0], [3.0, 3.0]]
//! direction = [1.0, 1.0]
//! grid = [0, 1, 2, 3, 4, 5, 6, 7, 8]
//!
//! [[sweep.observables]]
//! type = "siegel"
//! dim = 2
//!
//! [[sweep.observables]]
//! type = "siegel"
//! dim = 2
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::caseplan::{recursion_constants, CasePlanConstants};
use crate::error::{Error, Result};
use crate::lattice::{AdmissibleSet, FlowParam};
use crate::montecarlo::{AffineObservable, AffineOptions, Observable};
use crate::testfns::TrigPoly;
use crate::weights::Reading;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Theta,
    Sweep,
    Integral,
    Case,
    Affine,
    Circle,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Theta => "theta",
            Kind::Sweep => "sweep",
            Kind::Integral => "integral",
            Kind::Case => "case",
            Kind::Affine => "affine",
            Kind::Circle => "circle",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Kind::Sweep | Kind::Integral | Kind::Affine)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Stem of every artifact file name.
    pub id: String,
    pub kind: Kind,
    /// Mandatory for stochastic kinds.
    pub seed: Option<u64>,
    /// Relative paths resolve against the config file's directory.
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub theta: Option<ThetaSettings>,
    pub sweep: Option<SweepSettings>,
    pub integral: Option<IntegralSettings>,
    pub case: Option<CaseSettings>,
    pub affine: Option<AffineSettings>,
    pub circle: Option<CircleSettings>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_horizon() -> f64 {
    8.0
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaSettings {
    pub m: usize,
    pub n: usize,
    #[serde(default)]
    pub reading: Reading,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSettings {
    pub m: usize,
    pub n: usize,
    pub samples: u64,
    /// One observable per factor.
    pub observables: Vec<Observable>,
    /// One base flow per factor.
    pub base: Vec<Vec<f64>>,
    pub direction: Vec<f64>,
    pub grid: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// `∫ φ_1(a(t_1)y)⋯φ_r(a(t_r)y) dν(y)` and its decorrelation gap.
    Joint,
    /// `∫_{X_I} φ dμ_I` per observable, with their product.
    MuI,
    /// `∫_X φ dμ` via long flow translates.
    Haar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegralSettings {
    pub m: usize,
    pub n: usize,
    pub samples: u64,
    pub measure: Measure,
    pub observables: Vec<Observable>,
    /// Flow parameters for `joint`, one per observable.
    #[serde(default)]
    pub flows: Vec<Vec<f64>>,
    /// Admissible sets (1-based) for `mu_i`, one per observable.
    #[serde(default)]
    pub sets: Vec<Vec<usize>>,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    /// Re-run `haar`/`mu_i` at `horizon + 2` and compare.
    #[serde(default = "default_true")]
    pub stabilize: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSettings {
    pub m: usize,
    pub n: usize,
    #[serde(default = "default_ell")]
    pub ell: u32,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_slack")]
    pub slack: f64,
    /// Overrides the recursive `c_k` (requires `lambda` too).
    pub c: Option<Vec<f64>>,
    pub lambda: Option<f64>,
    /// Inline tuples: each a list of coordinate vectors.
    #[serde(default)]
    pub tuples: Vec<Vec<Vec<f64>>>,
    /// JSON file with one tuple (a list of coordinate vectors) or a list of
    /// tuples, relative to the config file.
    pub tuple_file: Option<PathBuf>,
}

fn default_ell() -> u32 {
    1
}

fn default_delta() -> f64 {
    1.0
}

fn default_slack() -> f64 {
    1.1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineSettings {
    pub phi: AffineObservable,
    pub psi: AffineObservable,
    pub w: [f64; 2],
    pub lengths: Vec<f64>,
    pub samples: u64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_affine_grid")]
    pub grid: usize,
    #[serde(default = "default_fiber_samples")]
    pub fiber_samples: usize,
}

fn default_affine_grid() -> usize {
    AffineOptions::default().grid
}

fn default_fiber_samples() -> usize {
    AffineOptions::default().fiber_samples
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleSettings {
    pub phi: TrigPoly,
    pub psi: TrigPoly,
    pub lengths: Vec<f64>,
}

/// A parsed config together with the directory its relative paths refer to.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn output_dir(&self) -> PathBuf {
        self.base_dir.join(&self.config.output_dir)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.base_dir.join(p)
    }
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let config = parse_config(&text)?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(LoadedConfig { config, base_dir })
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
    config.validate()?;
    Ok(config)
}

fn cfg(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn check_samples(n: u64) -> Result<()> {
    if n < 2 {
        return Err(cfg(format!("samples must be at least 2, got {n}")));
    }
    Ok(())
}

fn check_shape(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(cfg("m and n must be positive"));
    }
    if m + n > 31 {
        return Err(cfg(format!("m + n = {} is too large", m + n)));
    }
    Ok(())
}

fn check_observables(obs: &[Observable], m: usize, n: usize) -> Result<()> {
    if obs.is_empty() {
        return Err(cfg("at least one observable is required"));
    }
    for o in obs {
        o.check_shape(m, n).map_err(|e| cfg(e.to_string()))?;
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(cfg(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

pub(crate) fn flows(m: usize, n: usize, coords: &[Vec<f64>]) -> Result<Vec<FlowParam>> {
    coords
        .iter()
        .map(|c| FlowParam::new(m, n, c.clone()).map_err(|e| cfg(e.to_string())))
        .collect()
}

pub(crate) fn admissible_sets(m: usize, n: usize, sets: &[Vec<usize>]) -> Result<Vec<AdmissibleSet>> {
    sets.iter()
        .map(|s| AdmissibleSet::new(m, n, s).map_err(|e| cfg(e.to_string())))
        .collect()
}

impl CaseSettings {
    pub fn constants(&self, r: usize) -> Result<CasePlanConstants> {
        match (&self.c, self.lambda) {
            (None, None) => recursion_constants(self.m, self.n, r, self.ell, self.delta, self.slack),
            (Some(c), Some(lambda)) => {
                if c.len() != r {
                    return Err(cfg(format!("{} constants c_k for {r} factors", c.len())));
                }
                CasePlanConstants::custom(self.m, self.n, self.ell, self.delta, lambda, c.clone())
            }
            _ => Err(cfg("overriding the constants needs both c and lambda")),
        }
    }
}

impl ExperimentConfig {
    /// Checks everything that can be checked without running the experiment.
    pub fn validate(&self) -> Result<()> {
        let id_ok = !self.id.is_empty()
            && !self.id.starts_with('.')
            && self.id.len() <= 128
            && self.id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
        if !id_ok {
            return Err(cfg(format!(
                "id '{}' must be 1 to 128 characters from [A-Za-z0-9._-], not starting with '.'",
                self.id
            )));
        }
        if self.kind.is_stochastic() && self.seed.is_none() {
            return Err(cfg(format!("kind '{}' needs an explicit seed", self.kind)));
        }
        let present = [
            (Kind::Theta, self.theta.is_some()),
            (Kind::Sweep, self.sweep.is_some()),
            (Kind::Integral, self.integral.is_some()),
            (Kind::Case, self.case.is_some()),
            (Kind::Affine, self.affine.is_some()),
            (Kind::Circle, self.circle.is_some()),
        ];
        for (kind, is_there) in present {
            if kind == self.kind && !is_there {
                return Err(cfg(format!("kind '{kind}' needs a [{kind}] table")));
            }
            if kind != self.kind && is_there {
                return Err(cfg(format!("table [{kind}] does not belong to kind '{}'", self.kind)));
            }
        }
        match self.kind {
            Kind::Theta => {
                let s = self.theta.as_ref().expect("checked above");
                check_shape(s.m, s.n)
            }
            Kind::Sweep => self.sweep.as_ref().expect("checked above").validate(),
            Kind::Integral => self.integral.as_ref().expect("checked above").validate(),
            Kind::Case => self.case.as_ref().expect("checked above").validate(),
            Kind::Affine => self.affine.as_ref().expect("checked above").validate(),
            Kind::Circle => self.circle.as_ref().expect("checked above").validate(),
        }
    }
}

impl SweepSettings {
    fn validate(&self) -> Result<()> {
        check_shape(self.m, self.n)?;
        check_samples(self.samples)?;
        check_observables(&self.observables, self.m, self.n)?;
        if self.base.len() != self.observables.len() {
            return Err(cfg(format!(
                "{} observables but {} base flows",
                self.observables.len(),
                self.base.len()
            )));
        }
        flows(self.m, self.n, &self.base)?;
        let dir = flows(self.m, self.n, std::slice::from_ref(&self.direction))?;
        if dir[0].ceil() <= 0.0 {
            return Err(cfg("sweep direction must be nonzero"));
        }
        if self.grid.is_empty() {
            return Err(cfg("the Δ grid is empty"));
        }
        if let Some(d) = self.grid.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(cfg(format!("Δ values must be finite and nonnegative, got {d}")));
        }
        Ok(())
    }
}

impl IntegralSettings {
    fn validate(&self) -> Result<()> {
        check_shape(self.m, self.n)?;
        check_samples(self.samples)?;
        check_observables(&self.observables, self.m, self.n)?;
        check_positive("horizon", self.horizon)?;
        let r = self.observables.len();
        match self.measure {
            Measure::Joint => {
                if self.flows.len() != r {
                    return Err(cfg(format!("joint needs one flow per observable: {r} vs {}", self.flows.len())));
                }
                flows(self.m, self.n, &self.flows)?;
            }
            Measure::MuI => {
                if self.sets.len() != r {
                    return Err(cfg(format!("mu_i needs one set per observable: {r} vs {}", self.sets.len())));
                }
                admissible_sets(self.m, self.n, &self.sets)?;
            }
            Measure::Haar => {
                if r != 1 {
                    return Err(cfg("haar takes exactly one observable"));
                }
            }
        }
        if self.measure != Measure::Joint && !self.flows.is_empty() {
            return Err(cfg("flows only apply to measure = \"joint\""));
        }
        if self.measure != Measure::MuI && !self.sets.is_empty() {
            return Err(cfg("sets only apply to measure = \"mu_i\""));
        }
        Ok(())
    }
}

impl CaseSettings {
    fn validate(&self) -> Result<()> {
        check_shape(self.m, self.n)?;
        if self.tuples.is_empty() && self.tuple_file.is_none() {
            return Err(cfg("give tuples inline or through tuple_file"));
        }
        for t in &self.tuples {
            flows(self.m, self.n, t)?;
            self.constants(t.len())?;
        }
        Ok(())
    }
}

impl AffineSettings {
    fn validate(&self) -> Result<()> {
        check_samples(self.samples)?;
        check_positive("horizon", self.horizon)?;
        let norm = self.w[0].hypot(self.w[1]);
        check_positive("|w|", norm)?;
        if self.lengths.is_empty() {
            return Err(cfg("lengths is empty"));
        }
        for &l in &self.lengths {
            check_positive("length", l)?;
        }
        if self.grid == 0 || self.fiber_samples == 0 {
            return Err(cfg("grid and fiber_samples must be positive"));
        }
        for o in [&self.phi, &self.psi] {
            if let AffineObservable::Siegel(b) | AffineObservable::CellBump(b) = o {
                if b.dim != 2 {
                    return Err(cfg(format!("affine observables live in dimension 2, got {}", b.dim)));
                }
            }
        }
        Ok(())
    }

    pub fn options(&self) -> AffineOptions {
        AffineOptions { grid: self.grid, fiber_samples: self.fiber_samples }
    }
}

impl CircleSettings {
    fn validate(&self) -> Result<()> {
        for p in [&self.phi, &self.psi] {
            if (p.m(), p.n()) != (1, 1) {
                return Err(cfg("circle polynomials must have m = n = 1"));
            }
        }
        if self.lengths.is_empty() {
            return Err(cfg("lengths is empty"));
        }
        for &l in &self.lengths {
            check_positive("length", l)?;
        }
        Ok(())
    }
}

/// Reads a tuple file: either one tuple `[[t…], [t…]]` or a list of tuples.
pub fn read_tuple_file(path: &Path) -> Result<Vec<Vec<Vec<f64>>>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum TupleFile {
        One(Vec<Vec<f64>>),
        Many(Vec<Vec<Vec<f64>>>),
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read tuple file {}: {e}", path.display())))?;
    let parsed: TupleFile = serde_json::from_str(&text)
        .map_err(|_| Error::Config(format!("{} is not a JSON list of coordinate vectors", path.display())))?;
    Ok(match parsed {
        TupleFile::One(t) => vec![t],
        TupleFile::Many(ts) => ts,
    })
}
