//! The weight calculus of the diagonal action on `Lie(U)` and exact
//! verification of the weight-separation property.
//!
//! For admissible `I₁ ≠ I₂` the separation constant is
//!
//! ```text
//! θ*(I₁, I₂) = inf { max( max_{α mixing for I₁} α(s − t),
//!                         max_{α mixing for I₂} α(t − s) ) }
//! ```
//!
//! over `s ∈ A⁺_{I₁}`, `t ∈ A⁺_{I₂}` with every supported coordinate `≥ 1`.
//! Both sides are homogeneous of degree one, so `θ* > 0` is exactly the
//! statement that a positive `θ` separates every pair `(s, t)` relative to
//! `min(⌊s⌋_{I₁}, ⌊t⌋_{I₂})`. The infimum is computed as a rational linear
//! program and returned with a primal/dual certificate.

pub mod simplex;

use std::fmt;
use std::ops::{Add, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::AdmissibleSet;
use simplex::{Constraint, LinearProgram, LpOutcome, Sense, Q};

/// The root `α_ij(t) = t_i + t_j` attached to `E_ij`, 1-based indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Weight {
    pub i: usize,
    pub j: usize,
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "α_{},{}", self.i, self.j)
    }
}

/// Which alternative of the separation dichotomy a weight certifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    /// `α(s − t)` with `α` mixing for `I₁`.
    Case1,
    /// `α(t − s)` with `α` mixing for `I₂`.
    Case2,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Case1 => "case1",
            Side::Case2 => "case2",
        })
    }
}

/// Which definition of the face `A⁺_I` to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reading {
    /// `A⁺_I = {t ∈ A⁺ : t_i = 0 for i ∉ I}` (block sums agree).
    #[default]
    Balanced,
    /// Nonnegative vectors supported on `I`, block sums unconstrained.
    Unbalanced,
}

impl std::str::FromStr for Reading {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "balanced" => Ok(Reading::Balanced),
            "unbalanced" => Ok(Reading::Unbalanced),
            other => Err(Error::Config(format!("unknown A+_I reading '{other}'"))),
        }
    }
}

pub fn weight_value(i: usize, j: usize, t: &[f64]) -> Result<f64> {
    let d = t.len();
    if i == 0 || j == 0 || i > d || j > d || i == j {
        return Err(Error::domain(format!("invalid weight indices ({i}, {j}) for dimension {d}")));
    }
    Ok(t[i - 1] + t[j - 1])
}

/// All `α_ij` with `i ∈ I′`, `j ∈ I″`, lexicographically ordered.
pub fn mixing_weights(set: &AdmissibleSet) -> Vec<Weight> {
    let second = set.second_block();
    set.first_block()
        .iter()
        .flat_map(|i| second.iter().map(move |j| Weight { i, j }))
        .collect()
}

/// Candidate `(side, weight)` pairs in tie-breaking order: case 1 first, then
/// lexicographic in `(i, j)`.
pub fn candidates(i1: &AdmissibleSet, i2: &AdmissibleSet) -> Vec<(Side, Weight)> {
    mixing_weights(i1)
        .into_iter()
        .map(|w| (Side::Case1, w))
        .chain(mixing_weights(i2).into_iter().map(|w| (Side::Case2, w)))
        .collect()
}

fn candidate_value<T>(side: Side, w: Weight, s: &[T], t: &[T]) -> T
where
    T: Clone + Add<Output = T> + Sub<Output = T>,
{
    let (a, b) = match side {
        Side::Case1 => (s, t),
        Side::Case2 => (t, s),
    };
    (a[w.i - 1].clone() - b[w.i - 1].clone()) + (a[w.j - 1].clone() - b[w.j - 1].clone())
}

fn best_candidate<T>(i1: &AdmissibleSet, i2: &AdmissibleSet, s: &[T], t: &[T]) -> (Side, Weight, T)
where
    T: Clone + PartialOrd + Add<Output = T> + Sub<Output = T>,
{
    let mut best: Option<(Side, Weight, T)> = None;
    for (side, w) in candidates(i1, i2) {
        let v = candidate_value(side, w, s, t);
        if best.as_ref().is_none_or(|(_, _, b)| v > *b) {
            best = Some((side, w, v));
        }
    }
    best.expect("admissible sets always have a mixing weight")
}

/// The separation margin `value / Π(s, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Margin {
    Finite(f64),
    /// `Π(s, t) = 0`: the dichotomy holds trivially.
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationWitness {
    pub weight: Weight,
    pub side: Side,
    pub value: f64,
    pub pi: f64,
    pub margin: Margin,
}

/// The candidate weight maximizing the separation value at `(s, t)`.
pub fn separation_witness(s: &[f64], t: &[f64], i1: &AdmissibleSet, i2: &AdmissibleSet) -> Result<SeparationWitness> {
    let d = i1.m() + i1.n();
    if s.len() != d || t.len() != d {
        return Err(Error::Dimension { expected: d, got: s.len().min(t.len()) });
    }
    let (side, weight, value) = best_candidate(i1, i2, s, t);
    let floor = |v: &[f64], set: &AdmissibleSet| set.indices().iter().map(|&k| v[k - 1]).fold(f64::INFINITY, f64::min);
    let pi = floor(s, i1).min(floor(t, i2));
    let margin = if pi > 0.0 { Margin::Finite(value / pi) } else { Margin::Degenerate };
    Ok(SeparationWitness { weight, side, value, pi, margin })
}

/// Exact optimum of the separation program with its certificate.
#[derive(Clone, Debug)]
pub struct WeightCertificate {
    pub m: usize,
    pub n: usize,
    pub i1: AdmissibleSet,
    pub i2: AdmissibleSet,
    pub reading: Reading,
    pub theta_star: Q,
    pub witness_s: Vec<Q>,
    pub witness_t: Vec<Q>,
    pub achieving_weight: Weight,
    pub achieving_side: Side,
    /// One multiplier per row of [`separation_program`], in row order.
    pub lp_dual: Vec<Q>,
}

impl WeightCertificate {
    /// Whether the weight-separation property holds for this pair.
    pub fn separates(&self) -> bool {
        self.theta_star.is_positive()
    }

    /// Re-derives every claim of the certificate in rational arithmetic,
    /// independently of the simplex run that produced it.
    pub fn verify(&self) -> Result<()> {
        let program = separation_program(&self.i1, &self.i2, self.reading);
        let x = program.encode(&self.theta_star, &self.witness_s, &self.witness_t)?;
        if !program.lp.certifies_optimality(&x, &self.lp_dual) {
            return Err(Error::Internal("primal/dual certificate does not verify".into()));
        }
        let (side, weight, value) = best_candidate(&self.i1, &self.i2, &self.witness_s, &self.witness_t);
        if value != self.theta_star || side != self.achieving_side || weight != self.achieving_weight {
            return Err(Error::Internal("witness is not tight at theta_star".into()));
        }
        Ok(())
    }
}

/// The separation LP together with its variable layout.
pub struct SeparationProgram {
    pub lp: LinearProgram,
    dim: usize,
    s_support: Vec<usize>,
    t_support: Vec<usize>,
}

impl SeparationProgram {
    // Variables: z⁺, z⁻, then s on supp(I₁), then t on supp(I₂).
    fn encode(&self, z: &Q, s: &[Q], t: &[Q]) -> Result<Vec<Q>> {
        if s.len() != self.dim || t.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: s.len() });
        }
        let outside_zero = (1..=self.dim).all(|k| {
            (self.s_support.contains(&k) || s[k - 1].is_zero()) && (self.t_support.contains(&k) || t[k - 1].is_zero())
        });
        if !outside_zero {
            return Err(Error::Internal("witness not supported on its index set".into()));
        }
        let (zp, zm) = if z.is_negative() { (Q::zero(), -z) } else { (z.clone(), Q::zero()) };
        let mut x = vec![zp, zm];
        x.extend(self.s_support.iter().map(|&k| s[k - 1].clone()));
        x.extend(self.t_support.iter().map(|&k| t[k - 1].clone()));
        Ok(x)
    }

    fn decode(&self, x: &[Q]) -> (Q, Vec<Q>, Vec<Q>) {
        let z = &x[0] - &x[1];
        let mut s = vec![Q::zero(); self.dim];
        let mut t = vec![Q::zero(); self.dim];
        let off = 2;
        for (k, &idx) in self.s_support.iter().enumerate() {
            s[idx - 1] = x[off + k].clone();
        }
        let off = off + self.s_support.len();
        for (k, &idx) in self.t_support.iter().enumerate() {
            t[idx - 1] = x[off + k].clone();
        }
        (z, s, t)
    }
}

/// Builds `minimize z` subject to `z ≥` every candidate form, the support
/// lower bounds `s_i, t_j ≥ 1` and, for [`Reading::Balanced`], the two block
/// balance equations.
pub fn separation_program(i1: &AdmissibleSet, i2: &AdmissibleSet, reading: Reading) -> SeparationProgram {
    let m = i1.m();
    let dim = i1.m() + i1.n();
    let s_support = i1.indices();
    let t_support = i2.indices();
    let num_vars = 2 + s_support.len() + t_support.len();
    let s_var = |k: usize| s_support.iter().position(|&x| x == k).map(|p| 2 + p);
    let t_var = |k: usize| t_support.iter().position(|&x| x == k).map(|p| 2 + s_support.len() + p);
    let qi = |v: i64| Q::from_integer(v.into());

    let mut constraints = Vec::new();
    for (side, w) in candidates(i1, i2) {
        // z - form >= 0
        let mut coeffs = vec![Q::zero(); num_vars];
        coeffs[0] = qi(1);
        coeffs[1] = qi(-1);
        let sign = if side == Side::Case1 { 1 } else { -1 };
        for k in [w.i, w.j] {
            if let Some(v) = s_var(k) {
                coeffs[v] -= qi(sign);
            }
            if let Some(v) = t_var(k) {
                coeffs[v] += qi(sign);
            }
        }
        constraints.push(Constraint { coeffs, sense: Sense::Ge, rhs: Q::zero() });
    }
    for v in 2..num_vars {
        let mut coeffs = vec![Q::zero(); num_vars];
        coeffs[v] = qi(1);
        constraints.push(Constraint { coeffs, sense: Sense::Ge, rhs: qi(1) });
    }
    if reading == Reading::Balanced {
        for (support, var) in [(&s_support, &s_var as &dyn Fn(usize) -> Option<usize>), (&t_support, &t_var)] {
            let mut coeffs = vec![Q::zero(); num_vars];
            for &k in support.iter() {
                coeffs[var(k).unwrap()] = qi(if k <= m { 1 } else { -1 });
            }
            constraints.push(Constraint { coeffs, sense: Sense::Eq, rhs: Q::zero() });
        }
    }
    let mut objective = vec![Q::zero(); num_vars];
    objective[0] = qi(1);
    objective[1] = qi(-1);
    SeparationProgram {
        lp: LinearProgram { num_vars, objective, constraints },
        dim,
        s_support,
        t_support,
    }
}

/// Solves the separation program exactly and certifies the optimum.
pub fn optimal_theta(i1: &AdmissibleSet, i2: &AdmissibleSet, reading: Reading) -> Result<WeightCertificate> {
    let (m, n) = (i1.m(), i1.n());
    if (i2.m(), i2.n()) != (m, n) {
        return Err(Error::Dimension { expected: m + n, got: i2.m() + i2.n() });
    }
    if m == 1 && n == 1 {
        return Err(Error::domain("no distinct admissible pair exists for m = n = 1"));
    }
    if i1 == i2 {
        return Err(Error::domain(format!("index sets must differ, both are {i1}")));
    }
    let program = separation_program(i1, i2, reading);
    let x = match program.lp.solve() {
        LpOutcome::Optimal { x, .. } => x,
        LpOutcome::Unbounded => return Err(Error::Internal(format!("separation LP unbounded for {i1}, {i2}"))),
        LpOutcome::Infeasible => return Err(Error::Internal(format!("separation LP infeasible for {i1}, {i2}"))),
    };
    let dual_x = match program.lp.dual().solve() {
        LpOutcome::Optimal { x, .. } => x,
        other => return Err(Error::Internal(format!("dual separation LP not optimal: {other:?}"))),
    };
    let lp_dual = program.lp.dual_multipliers(&dual_x);
    let (theta_star, witness_s, witness_t) = program.decode(&x);
    let (achieving_side, achieving_weight, _) = best_candidate(i1, i2, &witness_s, &witness_t);
    let cert = WeightCertificate {
        m,
        n,
        i1: *i1,
        i2: *i2,
        reading,
        theta_star,
        witness_s,
        witness_t,
        achieving_weight,
        achieving_side,
        lp_dual,
    };
    cert.verify()?;
    Ok(cert)
}

/// `θ*` for every ordered pair of distinct admissible sets.
pub fn theta_table(m: usize, n: usize, reading: Reading) -> Result<Vec<WeightCertificate>> {
    let sets = crate::lattice::all_admissible(m, n);
    let mut out = Vec::new();
    for a in &sets {
        for b in &sets {
            if a != b {
                out.push(optimal_theta(a, b, reading)?);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::domain(format!("no distinct admissible pair exists for m = {m}, n = {n}")));
    }
    Ok(out)
}

pub fn format_rational(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(m: usize, n: usize, idx: &[usize]) -> AdmissibleSet {
        AdmissibleSet::new(m, n, idx).unwrap()
    }

    fn q(v: i64) -> Q {
        Q::from_integer(v.into())
    }

    #[test]
    fn weight_value_examples() {
        assert_eq!(weight_value(1, 2, &[2.0, 3.0]).unwrap(), 5.0);
        assert_eq!(weight_value(1, 2, &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(weight_value(1, 3, &[1.0, -1.0, 0.0]).unwrap(), 1.0);
        assert!(weight_value(0, 1, &[1.0, 1.0]).is_err());
        assert!(weight_value(1, 3, &[1.0, 1.0]).is_err());
        assert!(weight_value(2, 2, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn mixing_weight_examples() {
        assert_eq!(mixing_weights(&set(2, 1, &[1, 3])), vec![Weight { i: 1, j: 3 }]);
        assert_eq!(mixing_weights(&set(2, 1, &[1, 2, 3])), vec![Weight { i: 1, j: 3 }, Weight { i: 2, j: 3 }]);
        assert_eq!(mixing_weights(&AdmissibleSet::full(2, 2)).len(), 4);
    }

    #[test]
    fn theta_for_intro_pair() {
        let c = optimal_theta(&set(2, 1, &[1, 3]), &set(2, 1, &[2, 3]), Reading::Balanced).unwrap();
        assert_eq!(c.theta_star, q(1));
        assert_eq!(c.witness_s, vec![q(1), q(0), q(1)]);
        assert_eq!(c.witness_t, vec![q(0), q(1), q(1)]);
        assert_eq!(c.achieving_weight, Weight { i: 1, j: 3 });
        assert_eq!(c.achieving_side, Side::Case1);
    }

    #[test]
    fn theta_errors() {
        let full = AdmissibleSet::full(1, 1);
        assert!(matches!(optimal_theta(&full, &full, Reading::Balanced), Err(Error::Domain(_))));
        let a = set(2, 1, &[1, 3]);
        assert!(matches!(optimal_theta(&a, &a, Reading::Balanced), Err(Error::Domain(_))));
        assert!(theta_table(1, 1, Reading::Balanced).is_err());
    }

    #[test]
    fn theta_is_symmetric() {
        for (m, n) in [(2, 1), (2, 2)] {
            let sets = crate::lattice::all_admissible(m, n);
            for a in &sets {
                for b in &sets {
                    if a != b {
                        let ab = optimal_theta(a, b, Reading::Balanced).unwrap();
                        let ba = optimal_theta(b, a, Reading::Balanced).unwrap();
                        assert_eq!(ab.theta_star, ba.theta_star, "{a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn tampered_certificate_fails() {
        let mut c = optimal_theta(&set(2, 1, &[1, 3]), &set(2, 1, &[1, 2, 3]), Reading::Balanced).unwrap();
        c.verify().unwrap();
        c.theta_star = q(2);
        assert!(c.verify().is_err());
    }

    #[test]
    fn unbalanced_reading_can_lose_separation() {
        let c = optimal_theta(&set(2, 1, &[1, 3]), &set(2, 1, &[1, 2, 3]), Reading::Unbalanced).unwrap();
        assert!(!c.separates());
    }

    #[test]
    fn separation_witness_examples() {
        let (a, b) = (set(2, 1, &[1, 3]), set(2, 1, &[2, 3]));
        let w = separation_witness(&[1.0, 0.0, 1.0], &[0.0, 1.0, 1.0], &a, &b).unwrap();
        assert_eq!(w.weight, Weight { i: 1, j: 3 });
        assert_eq!(w.side, Side::Case1);
        assert_eq!(w.margin, Margin::Finite(1.0));

        let z = separation_witness(&[0.0; 3], &[0.0; 3], &a, &b).unwrap();
        assert_eq!(z.margin, Margin::Degenerate);
    }

    #[test]
    fn rational_formatting() {
        assert_eq!(format_rational(&q(3)), "3");
        assert_eq!(format_rational(&Q::new(4.into(), 3.into())), "4/3");
        assert_eq!(format_rational(&Q::new((-1).into(), 2.into())), "-1/2");
    }
}
