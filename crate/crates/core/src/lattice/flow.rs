use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::index_set::{AdmissibleSet, IndexSet};
use crate::error::{Error, Result};

/// Tolerance on `Σ_{i≤m} t_i = Σ_{j>m} t_j`, absolute for block sums up
/// to 1 and relative above.
pub const BALANCE_TOL: f64 = 1e-12;

fn balance_slack(first: f64, second: f64) -> f64 {
    BALANCE_TOL * first.abs().max(second.abs()).max(1.0)
}

/// A point `t` of the cone `A⁺`: `m + n` nonnegative flow times whose two
/// block sums agree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFlowParam", into = "RawFlowParam")]
pub struct FlowParam {
    m: usize,
    n: usize,
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawFlowParam {
    m: usize,
    n: usize,
    coords: Vec<f64>,
}

impl TryFrom<RawFlowParam> for FlowParam {
    type Error = Error;
    fn try_from(raw: RawFlowParam) -> Result<Self> {
        FlowParam::new(raw.m, raw.n, raw.coords)
    }
}

impl From<FlowParam> for RawFlowParam {
    fn from(t: FlowParam) -> Self {
        RawFlowParam { m: t.m, n: t.n, coords: t.coords }
    }
}

impl FlowParam {
    /// Validates nonnegativity and the balance condition. Inputs whose block
    /// sums differ by at most [`BALANCE_TOL`] are nudged into exact balance by
    /// topping up the largest coordinate of the lighter block.
    pub fn new(m: usize, n: usize, mut coords: Vec<f64>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::domain("m and n must be positive"));
        }
        if coords.len() != m + n {
            return Err(Error::Dimension { expected: m + n, got: coords.len() });
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::invariant(format!("flow coordinate {bad} is not a nonnegative real")));
        }
        let first: f64 = coords[..m].iter().sum();
        let second: f64 = coords[m..].iter().sum();
        let diff = first - second;
        if diff.abs() > balance_slack(first, second) {
            return Err(Error::invariant(format!(
                "unbalanced flow parameter: block sums {first} and {second}"
            )));
        }
        if diff != 0.0 {
            let block = if diff > 0.0 { m..m + n } else { 0..m };
            let k = block.clone().max_by(|&a, &b| coords[a].total_cmp(&coords[b])).unwrap();
            coords[k] += diff.abs();
        }
        Ok(FlowParam { m, n, coords })
    }

    pub fn zero(m: usize, n: usize) -> Self {
        FlowParam { m, n, coords: vec![0.0; m + n] }
    }

    /// The balanced parameter supported on `I` with `⌊t⌋_I = horizon`:
    /// coordinates in `I′` equal `horizon·|I″|/g`, those in `I″` equal
    /// `horizon·|I′|/g`, where `g = min(|I′|, |I″|)`.
    pub fn uniform_on(set: &AdmissibleSet, horizon: f64) -> Result<Self> {
        if !(horizon >= 0.0) {
            return Err(Error::domain("horizon must be nonnegative"));
        }
        let k1 = set.first_block().len() as f64;
        let k2 = set.second_block().len() as f64;
        let g = k1.min(k2);
        let (m, n) = (set.m(), set.n());
        let coords = (1..=m + n)
            .map(|i| match (set.contains(i), i <= m) {
                (false, _) => 0.0,
                (true, true) => horizon * k2 / g,
                (true, false) => horizon * k1 / g,
            })
            .collect();
        FlowParam::new(m, n, coords)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.m + self.n
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// 1-based coordinate access.
    pub fn get(&self, i: usize) -> f64 {
        self.coords[i - 1]
    }

    /// `⌊t⌋_I`, or 0 for the empty set.
    pub fn floor_on(&self, set: &IndexSet) -> f64 {
        set.iter().map(|i| self.get(i)).reduce(f64::min).unwrap_or(0.0)
    }

    /// `⌈t⌉_I`, or 0 for the empty set.
    pub fn ceil_on(&self, set: &IndexSet) -> f64 {
        set.iter().map(|i| self.get(i)).reduce(f64::max).unwrap_or(0.0)
    }

    /// `⌈t⌉` over all coordinates.
    pub fn ceil(&self) -> f64 {
        self.ceil_on(&IndexSet::full(self.dim()))
    }

    pub fn checked_add(&self, other: &FlowParam) -> Result<FlowParam> {
        self.same_shape(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        FlowParam::new(self.m, self.n, coords)
    }

    /// `self + scale·other` for `scale ≥ 0`.
    pub fn add_scaled(&self, other: &FlowParam, scale: f64) -> Result<FlowParam> {
        self.same_shape(other)?;
        if !(scale >= 0.0) {
            return Err(Error::domain("scale must be nonnegative"));
        }
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + scale * b).collect();
        FlowParam::new(self.m, self.n, coords)
    }

    /// Sup-norm distance `‖t − s‖`.
    pub fn sup_dist(&self, other: &FlowParam) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    fn same_shape(&self, other: &FlowParam) -> Result<()> {
        if self.m != other.m || self.n != other.n {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }
}

/// `a(t) = diag(e^{t_1},…,e^{t_m}, e^{-t_{m+1}},…,e^{-t_{m+n}})`.
pub fn flow_matrix(t: &FlowParam) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(flow_diagonal(t)))
}

pub(crate) fn flow_diagonal(t: &FlowParam) -> Vec<f64> {
    t.coords
        .iter()
        .enumerate()
        .map(|(k, &c)| if k < t.m { c.exp() } else { (-c).exp() })
        .collect()
}

/// `Δ(t_1,…,t_r) = min_{i≠j} ‖t_i − t_j‖` in the sup-norm.
pub fn delta_spread(ts: &[FlowParam]) -> Result<f64> {
    if ts.len() < 2 {
        return Err(Error::domain("delta_spread needs at least two parameters"));
    }
    for t in &ts[1..] {
        ts[0].same_shape(t)?;
    }
    let mut best = f64::INFINITY;
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            best = best.min(ts[i].sup_dist(&ts[j]));
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Floor,
    Ceil,
}

pub fn restricted_extrema(t: &FlowParam, set: &IndexSet, mode: Extremum) -> f64 {
    match mode {
        Extremum::Floor => t.floor_on(set),
        Extremum::Ceil => t.ceil_on(set),
    }
}

/// A coordinatewise restriction of a flow parameter. The restriction of a
/// balanced parameter to an arbitrary support need not be balanced; the
/// `balanced` flag records which case occurred.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedParam {
    pub m: usize,
    pub n: usize,
    pub coords: Vec<f64>,
    pub support: IndexSet,
    pub balanced: bool,
}

impl RestrictedParam {
    fn restrict(t: &FlowParam, support: IndexSet) -> Self {
        let coords: Vec<f64> = (1..=t.dim())
            .map(|i| if support.contains(i) { t.get(i) } else { 0.0 })
            .collect();
        let first: f64 = coords[..t.m].iter().sum();
        let second: f64 = coords[t.m..].iter().sum();
        RestrictedParam {
            m: t.m,
            n: t.n,
            balanced: (first - second).abs() <= balance_slack(first, second),
            coords,
            support,
        }
    }

    pub fn sup_dist(&self, other: &RestrictedParam) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Back to the cone `A⁺` when the restriction happens to be balanced.
    pub fn to_flow(&self) -> Option<FlowParam> {
        if self.balanced {
            FlowParam::new(self.m, self.n, self.coords.clone()).ok()
        } else {
            None
        }
    }
}

/// Splits `t = t′ + t″` with `t′` supported on `I` and `t″` on its complement.
pub fn restrict_param(t: &FlowParam, set: &IndexSet) -> Result<(RestrictedParam, RestrictedParam)> {
    if set.dim() != t.dim() {
        return Err(Error::Dimension { expected: t.dim(), got: set.dim() });
    }
    Ok((RestrictedParam::restrict(t, *set), RestrictedParam::restrict(t, set.complement())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn fp(m: usize, n: usize, c: &[f64]) -> FlowParam {
        FlowParam::new(m, n, c.to_vec()).unwrap()
    }

    #[test]
    fn flow_matrix_examples() {
        let id = flow_matrix(&FlowParam::zero(1, 1));
        assert_eq!(id, DMatrix::identity(2, 2));

        let a = flow_matrix(&fp(1, 1, &[1.0, 1.0]));
        assert!((a[(0, 0)] - E).abs() < 1e-15);
        assert!((a[(1, 1)] - 1.0 / E).abs() < 1e-15);
        assert_eq!(a[(0, 1)], 0.0);

        let b = flow_matrix(&fp(2, 1, &[1.0, 2.0, 3.0]));
        assert!((b[(0, 0)] - E).abs() < 1e-15);
        assert!((b[(1, 1)] - E * E).abs() < 1e-14);
        assert!((b[(2, 2)] - (-3.0f64).exp()).abs() < 1e-16);
        assert!((b.determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unbalanced_is_rejected() {
        assert!(matches!(FlowParam::new(1, 1, vec![1.0, 2.0]), Err(Error::Invariant(_))));
        assert!(FlowParam::new(1, 1, vec![-1.0, -1.0]).is_err());
        assert!(FlowParam::new(2, 1, vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn tiny_imbalance_is_repaired() {
        let t = FlowParam::new(2, 1, vec![0.1, 0.2, 0.3]).unwrap();
        let c = t.coords();
        assert_eq!(c[0] + c[1], c[2]);
    }

    #[test]
    fn delta_spread_examples() {
        let d = delta_spread(&[fp(1, 1, &[1.0, 1.0]), fp(1, 1, &[3.0, 3.0])]).unwrap();
        assert_eq!(d, 2.0);
        let t = fp(1, 1, &[2.0, 2.0]);
        assert_eq!(delta_spread(&[t.clone(), fp(1, 1, &[5.0, 5.0]), t]).unwrap(), 0.0);
        let ts = [fp(2, 1, &[1.0, 2.0, 3.0]), fp(2, 1, &[4.0, 2.0, 6.0]), FlowParam::zero(2, 1)];
        assert_eq!(delta_spread(&ts).unwrap(), 3.0);
        assert!(delta_spread(&ts[..1]).is_err());
    }

    #[test]
    fn extrema_examples() {
        let t = fp(2, 1, &[2.0, 1.0, 3.0]);
        let i13 = IndexSet::from_indices(3, &[1, 3]).unwrap();
        assert_eq!(restricted_extrema(&t, &i13, Extremum::Floor), 2.0);
        assert_eq!(restricted_extrema(&t, &IndexSet::empty(3), Extremum::Ceil), 0.0);
        assert_eq!(restricted_extrema(&t, &IndexSet::empty(3), Extremum::Floor), 0.0);
        assert_eq!(restricted_extrema(&t, &IndexSet::full(3), Extremum::Ceil), 3.0);
    }

    #[test]
    fn restriction_examples() {
        let i13 = IndexSet::from_indices(3, &[1, 3]).unwrap();
        let (a, b) = restrict_param(&fp(2, 1, &[2.0, 1.0, 3.0]), &i13).unwrap();
        assert_eq!(a.coords, vec![2.0, 0.0, 3.0]);
        assert!(!a.balanced);
        assert_eq!(b.coords, vec![0.0, 1.0, 0.0]);
        assert!(!b.balanced);

        let t = fp(2, 1, &[3.0, 0.0, 3.0]);
        let (a, b) = restrict_param(&t, &i13).unwrap();
        assert_eq!(a.coords, t.coords());
        assert!(a.balanced);
        assert_eq!(b.coords, vec![0.0; 3]);
        assert_eq!(a.to_flow().unwrap(), t);
    }

    #[test]
    fn uniform_on_balances_and_hits_horizon() {
        let i = AdmissibleSet::new(3, 2, &[1, 2, 4]).unwrap();
        let t = FlowParam::uniform_on(&i, 6.0).unwrap();
        assert_eq!(t.coords(), &[6.0, 6.0, 0.0, 12.0, 0.0]);
        assert_eq!(t.floor_on(i.as_set()), 6.0);
        let j = AdmissibleSet::new(2, 1, &[1, 3]).unwrap();
        assert_eq!(FlowParam::uniform_on(&j, 6.0).unwrap().coords(), &[6.0, 0.0, 6.0]);
    }
}
