//! The case analysis behind the multiple decorrelation bound, as an
//! executable classifier.
//!
//! Given flow parameters `t_1, …, t_r`, [`classify_case`] walks the levels
//! `k = r, r−1, …`. At each level it either finds index sets for which the
//! separated-parameter lemma applies (Case 1′, possibly after Case 1″
//! enlargements) or absorbs one factor with small `⌈t_s⌉` (Case 2) and
//! descends. Each step is recorded in a [`CaseTrace`].

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{all_admissible, delta_spread, AdmissibleSet, FlowParam, IndexSet};

/// `λ = max(2, 4rℓ/δ)`.
pub fn lambda_constant(r: usize, ell: u32, delta: f64) -> Result<f64> {
    if r == 0 || ell == 0 {
        return Err(Error::domain("r and ell must be positive"));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::domain(format!("delta must be positive, got {delta}")));
    }
    Ok(f64::max(2.0, 4.0 * r as f64 * ell as f64 / delta))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CasePlanConstants {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub ell: u32,
    pub delta: f64,
    pub lambda: f64,
    /// `c_1 ≤ … ≤ c_r`.
    pub c: Vec<f64>,
}

/// `c_1 = slack·max(m,n)` and
/// `c_{k+1} = slack·max(1, 4(r−k)·max(m,n)·λ^{r(m+n)}/δ)·c_k`.
pub fn recursion_constants(m: usize, n: usize, r: usize, ell: u32, delta: f64, slack: f64) -> Result<CasePlanConstants> {
    if m == 0 || n == 0 {
        return Err(Error::domain("m and n must be positive"));
    }
    if !(slack > 1.0 && slack.is_finite()) {
        return Err(Error::domain(format!("slack must exceed 1 for strict inequalities, got {slack}")));
    }
    let lambda = lambda_constant(r, ell, delta)?;
    let mx = m.max(n) as f64;
    let power = lambda.powi((r * (m + n)) as i32);
    if !power.is_finite() {
        return Err(Error::Numerical(format!(
            "λ^(r(m+n)) = {lambda}^{} overflows; use a smaller r or a larger delta",
            r * (m + n)
        )));
    }
    let mut c = vec![slack * mx];
    for k in 1..r {
        let factor = f64::max(1.0, 4.0 * (r - k) as f64 * mx * power / delta);
        let next = slack * factor * c[k - 1];
        if !next.is_finite() {
            return Err(Error::Numerical(format!(
                "c_{} overflows; use a smaller r or a larger delta",
                k + 1
            )));
        }
        c.push(next);
    }
    Ok(CasePlanConstants { m, n, r, ell, delta, lambda, c })
}

impl CasePlanConstants {
    /// Hand-picked constants. Only what termination needs is enforced:
    /// `c_1 > max(m,n)`, `c` nondecreasing and `λ ≥ 2`.
    pub fn custom(m: usize, n: usize, ell: u32, delta: f64, lambda: f64, c: Vec<f64>) -> Result<Self> {
        let k = CasePlanConstants { m, n, r: c.len(), ell, delta, lambda, c };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.r == 0 || self.c.len() != self.r {
            return Err(Error::invariant("constants need m, n, r ≥ 1 and r entries in c"));
        }
        if !(self.lambda >= 2.0 && self.lambda.is_finite()) {
            return Err(Error::invariant(format!("λ must be at least 2, got {}", self.lambda)));
        }
        if !(self.c[0] > self.m.max(self.n) as f64) {
            return Err(Error::invariant(format!("c_1 = {} must exceed max(m, n)", self.c[0])));
        }
        if self.c.windows(2).any(|w| !(w[1] >= w[0])) || self.c.iter().any(|x| !x.is_finite()) {
            return Err(Error::invariant("c must be finite and nondecreasing"));
        }
        Ok(())
    }

    /// Whether `c_{k+1} > max(1, 4(r−k)·max(m,n)·λ^{r(m+n)}/δ)·c_k` for all `k`,
    /// which makes every terminal rate positive.
    pub fn satisfies_recursion(&self) -> bool {
        let mx = self.m.max(self.n) as f64;
        let power = self.lambda.powi((self.r * (self.m + self.n)) as i32);
        (1..self.r).all(|k| self.c[k] > f64::max(1.0, 4.0 * (self.r - k) as f64 * mx * power / self.delta) * self.c[k - 1])
    }
}

/// Result of checking the hypotheses of the separated-parameter lemma.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub delta: f64,
    /// `min_s ⌊t_s⌋_{I_s}`.
    pub min_floor: f64,
    /// `max_s ⌈t_s⌉_{I_s^c}`.
    pub max_complement_ceil: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    /// `Δ = 0`; both hypotheses hold trivially.
    pub degenerate: bool,
    /// Pairs `(s1, s2)` (1-based) where the restricted parameters are closer
    /// than the originals. Only populated when both hypotheses hold.
    pub violations: Vec<(usize, usize)>,
    pub pairs_checked: usize,
}

fn floor_on(t: &FlowParam, set: &IndexSet) -> f64 {
    t.floor_on(set)
}

fn ceil_on(t: &FlowParam, set: &IndexSet) -> f64 {
    t.ceil_on(set)
}

fn check_tuple_shape(ts: &[FlowParam]) -> Result<(usize, usize)> {
    let first = ts.first().ok_or_else(|| Error::domain("need at least one flow parameter"))?;
    let (m, n) = (first.m(), first.n());
    if let Some(t) = ts.iter().find(|t| (t.m(), t.n()) != (m, n)) {
        return Err(Error::Dimension { expected: m + n, got: t.dim() });
    }
    Ok((m, n))
}

/// Evaluates `min ⌊t_s⌋_{I_s} ≥ αΔ` and `max ⌈t_s⌉_{I_s^c} ≤ βΔ`; when both
/// hold, checks `‖t′_{s1} − t′_{s2}‖ ≥ ‖t_{s1} − t_{s2}‖` for every pair, where
/// `t′_s` keeps the coordinates of `t_s` on `I_s`.
pub fn check_separated(ts: &[FlowParam], sets: &[AdmissibleSet], alpha: f64, beta: f64) -> Result<SeparationReport> {
    let (m, n) = check_tuple_shape(ts)?;
    if sets.len() != ts.len() {
        return Err(Error::domain(format!("{} parameters but {} index sets", ts.len(), sets.len())));
    }
    if sets.iter().any(|s| (s.m(), s.n()) != (m, n)) {
        return Err(Error::Dimension { expected: m + n, got: 0 });
    }
    if !(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0) {
        return Err(Error::domain(format!("alpha and beta must lie in (0, 1), got {alpha}, {beta}")));
    }
    let delta = delta_spread(ts)?;
    let min_floor = ts.iter().zip(sets).map(|(t, s)| floor_on(t, s.as_set())).fold(f64::INFINITY, f64::min);
    let max_complement_ceil = ts.iter().zip(sets).map(|(t, s)| ceil_on(t, &s.complement())).fold(0.0, f64::max);
    let lower_holds = min_floor >= alpha * delta;
    let upper_holds = max_complement_ceil <= beta * delta;
    let mut violations = Vec::new();
    let mut pairs_checked = 0;
    if lower_holds && upper_holds {
        let restricted: Vec<Vec<f64>> = ts
            .iter()
            .zip(sets)
            .map(|(t, s)| (1..=m + n).map(|i| if s.contains(i) { t.get(i) } else { 0.0 }).collect())
            .collect();
        let sup = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()));
        for s1 in 0..ts.len() {
            for s2 in s1 + 1..ts.len() {
                pairs_checked += 1;
                if sup(&restricted[s1], &restricted[s2]) < sup(ts[s1].coords(), ts[s2].coords()) {
                    violations.push((s1 + 1, s2 + 1));
                }
            }
        }
    }
    Ok(SeparationReport {
        delta,
        min_floor,
        max_complement_ceil,
        lower_holds,
        upper_holds,
        degenerate: delta == 0.0,
        violations,
        pairs_checked,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    /// Case 1′: the separated-parameter lemma applies.
    OnePrime,
    /// Case 1″: some complement coordinate is too large; enlarge and restart.
    OneDoublePrime,
    /// Case 2: no admissible tuple works; absorb a factor.
    Two,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::OnePrime => "1′",
            CaseTag::OneDoublePrime => "1″",
            CaseTag::Two => "2",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseStep {
    pub level: usize,
    pub tag: CaseTag,
    /// Active factors at this level, 1-based.
    pub factors: Vec<usize>,
    /// `I_s` for each active factor (empty in Case 2).
    pub sets: Vec<Vec<usize>>,
    /// `J_s` for each active factor (Case 1″ only).
    pub enlargements: Vec<Vec<usize>>,
    pub restart: usize,
    /// `λ^j·c_k` in force at this step.
    pub multiplier: f64,
    /// The factor absorbed in Case 2.
    pub absorbed: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Terminal {
    /// `Δ = 0`: the bound is trivial.
    Degenerate,
    /// Case 1′ fired at `level` after `restarts` enlargements.
    OnePrime {
        level: usize,
        restarts: usize,
        multiplier: f64,
        /// `δ/(2λ^j c_k) − 2(r−k)·max(m,n)/c_{k+1}`, the decay rate of the bound.
        rate: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseTrace {
    pub delta: f64,
    pub steps: Vec<CaseStep>,
    pub terminal: Terminal,
}

impl CaseTrace {
    pub fn max_restarts(&self) -> usize {
        self.steps.iter().map(|s| s.restart).max().unwrap_or(0)
    }

    /// Whether the terminal bound decays.
    pub fn favourable(&self) -> bool {
        match self.terminal {
            Terminal::Degenerate => true,
            Terminal::OnePrime { rate, .. } => rate > 0.0,
        }
    }
}

impl fmt::Display for CaseTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Δ = {}", self.delta)?;
        for s in &self.steps {
            write!(f, "  level {} case {}", s.level, s.tag)?;
            match s.tag {
                CaseTag::Two => writeln!(f, ": absorb factor {}", s.absorbed.unwrap_or(0))?,
                _ => {
                    let sets: Vec<String> = s.sets.iter().map(|v| fmt_set(v)).collect();
                    write!(f, " restart {} multiplier {:.6e} I = {}", s.restart, s.multiplier, sets.join(" "))?;
                    if s.tag == CaseTag::OneDoublePrime {
                        let js: Vec<String> = s.enlargements.iter().map(|v| fmt_set(v)).collect();
                        write!(f, " J = {}", js.join(" "))?;
                    }
                    writeln!(f)?;
                }
            }
        }
        match &self.terminal {
            Terminal::Degenerate => writeln!(f, "  terminal: degenerate (Δ = 0)"),
            Terminal::OnePrime { level, restarts, rate, .. } => {
                writeln!(f, "  terminal: case 1′ at level {level} after {restarts} restarts, rate {rate:.6e}")
            }
        }
    }
}

fn fmt_set(v: &[usize]) -> String {
    let inner: Vec<String> = v.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// The admissible set maximizing `⌊t⌋_I`; ties go to the larger set, then
/// to the lexicographically smaller one.
fn best_set(t: &FlowParam, candidates: &[AdmissibleSet]) -> (AdmissibleSet, f64) {
    let mut best = candidates[0];
    let mut best_floor = floor_on(t, best.as_set());
    for c in &candidates[1..] {
        let f = floor_on(t, c.as_set());
        let better = f > best_floor || (f == best_floor && c.len() > best.len());
        if better {
            best = *c;
            best_floor = f;
        }
    }
    (best, best_floor)
}

/// Runs the level-by-level case analysis on `ts`.
pub fn classify_case(ts: &[FlowParam], constants: &CasePlanConstants) -> Result<CaseTrace> {
    constants.validate()?;
    let (m, n) = check_tuple_shape(ts)?;
    let r = ts.len();
    if r < 2 {
        return Err(Error::domain("a single factor needs no case analysis"));
    }
    if (m, n, r) != (constants.m, constants.n, constants.r) {
        return Err(Error::invariant(format!(
            "constants are for (m, n, r) = ({}, {}, {}), tuple is ({m}, {n}, {r})",
            constants.m, constants.n, constants.r
        )));
    }
    let delta = delta_spread(ts)?;
    if delta == 0.0 {
        return Ok(CaseTrace { delta, steps: Vec::new(), terminal: Terminal::Degenerate });
    }
    let mx = m.max(n) as f64;
    let lambda = constants.lambda;
    let admissible = all_admissible(m, n);
    let max_restarts = r * (m + n);
    let mut active: Vec<usize> = (0..r).collect();
    let mut steps = Vec::new();

    while let Some(k) = (!active.is_empty()).then_some(active.len()) {
        let ck = constants.c[k - 1];
        let picks: Vec<(AdmissibleSet, f64)> = active.iter().map(|&s| best_set(&ts[s], &admissible)).collect();
        let min_floor = picks.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);

        if delta <= ck * min_floor {
            let mut sets: Vec<IndexSet> = picks.iter().map(|p| *p.0.as_set()).collect();
            let mut multiplier = ck;
            for restart in 0..=max_restarts {
                let threshold = delta / (lambda * multiplier);
                let worst = active.iter().zip(&sets).map(|(&s, i)| ceil_on(&ts[s], &i.complement())).fold(0.0, f64::max);
                let record = |tag, enlargements: Vec<Vec<usize>>| CaseStep {
                    level: k,
                    tag,
                    factors: active.iter().map(|s| s + 1).collect(),
                    sets: sets.iter().map(IndexSet::indices).collect(),
                    enlargements,
                    restart,
                    multiplier,
                    absorbed: None,
                };
                if delta >= lambda * multiplier * worst {
                    steps.push(record(CaseTag::OnePrime, Vec::new()));
                    let tail = if k < r { 2.0 * (r - k) as f64 * mx / constants.c[k] } else { 0.0 };
                    let rate = constants.delta / (2.0 * multiplier) - tail;
                    return Ok(CaseTrace {
                        delta,
                        steps,
                        terminal: Terminal::OnePrime { level: k, restarts: restart, multiplier, rate },
                    });
                }
                let js: Vec<IndexSet> = active
                    .iter()
                    .zip(&sets)
                    .map(|(&s, i)| {
                        let picked: Vec<usize> = i.complement().iter().filter(|&j| ts[s].get(j) > threshold).collect();
                        IndexSet::from_indices(m + n, &picked).expect("indices come from a complement")
                    })
                    .collect();
                if js.iter().all(IndexSet::is_empty) {
                    return Err(Error::Internal("case 1″ with no index to enlarge".into()));
                }
                steps.push(record(CaseTag::OneDoublePrime, js.iter().map(IndexSet::indices).collect()));
                for (i, j) in sets.iter_mut().zip(&js) {
                    *i = i.union(j);
                }
                multiplier *= lambda;
            }
            return Err(Error::Internal(format!("more than {max_restarts} restarts at level {k}")));
        }

        // Case 2: absorb the active factor with the smallest ⌈t_s⌉.
        let (pos, &s) = active
            .iter()
            .enumerate()
            .min_by(|a, b| ts[*a.1].ceil().total_cmp(&ts[*b.1].ceil()).then(a.1.cmp(b.1)))
            .expect("active is nonempty");
        if !(delta > ck / mx * ts[s].ceil()) {
            return Err(Error::Internal(format!("case 2 at level {k} has no factor to absorb")));
        }
        steps.push(CaseStep {
            level: k,
            tag: CaseTag::Two,
            factors: active.iter().map(|s| s + 1).collect(),
            sets: Vec::new(),
            enlargements: Vec::new(),
            restart: 0,
            multiplier: ck,
            absorbed: Some(s + 1),
        });
        active.remove(pos);
    }
    Err(Error::Internal(
        "every factor was absorbed: Δ exceeds c_1/max(m,n) times every ⌈t_s⌉".into(),
    ))
}

/// A random point of `A⁺` with coordinates spread over many orders of
/// magnitude, including exact zeros, for fuzzing the classifier.
pub fn random_flow(m: usize, n: usize, rng: &mut impl Rng) -> FlowParam {
    let scale = 10f64.powf(rng.random_range(-6.0..8.0));
    let mut coords: Vec<f64> = (0..m + n)
        .map(|_| {
            if rng.random_bool(0.25) {
                0.0
            } else {
                scale * 10f64.powf(rng.random_range(-4.0..0.0))
            }
        })
        .collect();
    balance(&mut coords, m, rng);
    FlowParam::new(m, n, coords).expect("balanced by construction")
}

fn balance(coords: &mut [f64], m: usize, rng: &mut impl Rng) {
    let first: f64 = coords[..m].iter().sum();
    let second: f64 = coords[m..].iter().sum();
    if first == 0.0 && second == 0.0 {
        return;
    }
    let (short, target) = if first < second { (0..m, second) } else { (m..coords.len(), first) };
    let have: f64 = coords[short.clone()].iter().sum();
    if have == 0.0 {
        let i = rng.random_range(short);
        coords[i] = target;
    } else {
        for i in short {
            coords[i] *= target / have;
        }
    }
}

/// A random tuple with random sets `I_s`: coordinates on `I_s` are drawn
/// from `level·[1, 3)` and those on `I_s^c` from `spill·level·[0, 1)`,
/// with one random `level ∈ [1, 10)` per tuple. Not every draw satisfies
/// the lemma's hypotheses; callers filter with [`check_separated`].
pub fn random_separated_candidate(
    m: usize,
    n: usize,
    r: usize,
    spill: f64,
    rng: &mut impl Rng,
) -> (Vec<FlowParam>, Vec<AdmissibleSet>) {
    let admissible = all_admissible(m, n);
    let sets: Vec<AdmissibleSet> = (0..r).map(|_| admissible[rng.random_range(0..admissible.len())]).collect();
    let level = rng.random_range(1.0..10.0);
    let ts = sets
        .iter()
        .map(|set| {
            let mut coords = vec![0.0; m + n];
            for i in set.indices() {
                coords[i - 1] = level * rng.random_range(1.0..3.0);
            }
            for i in set.complement().iter() {
                coords[i - 1] = spill * level * rng.random_range(0.0..1.0);
            }
            balance(&mut coords, m, rng);
            FlowParam::new(m, n, coords).expect("balanced by construction")
        })
        .collect();
    (ts, sets)
}
