//! Dense two-phase simplex over exact rationals with Bland's anti-cycling
//! rule. Sized for the weight programs (a dozen variables, a few dozen rows).

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub sense: Sense,
    pub rhs: Q,
}

/// `minimize objective·x` subject to the constraints and `x ≥ 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Q>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Q>>, // each row: coefficients then rhs
    obj: Vec<Q>,       // reduced costs then -value
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule over columns `allowed`. Returns false if unbounded.
    fn optimize(&mut self, allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let entering = (0..self.cols).find(|&j| allowed(j) && self.obj[j].is_negative());
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, Q)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.cols] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((br, bq)) => ratio < *bq || (ratio == *bq && self.basis[r] < self.basis[*br]),
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

impl LinearProgram {
    pub fn solve(&self) -> LpOutcome {
        let n = self.num_vars;
        let m = self.constraints.len();

        // Normalize to nonnegative right-hand sides.
        let mut rows: Vec<(Vec<Q>, Sense, Q)> = self
            .constraints
            .iter()
            .map(|c| {
                if c.rhs.is_negative() {
                    let flipped = match c.sense {
                        Sense::Le => Sense::Ge,
                        Sense::Ge => Sense::Le,
                        Sense::Eq => Sense::Eq,
                    };
                    (c.coeffs.iter().map(|v| -v).collect(), flipped, -&c.rhs)
                } else {
                    (c.coeffs.clone(), c.sense, c.rhs.clone())
                }
            })
            .collect();

        let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
        let cols = n + n_slack + n_art;
        let art_start = n + n_slack;

        let mut tab_rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut slack, mut art) = (n, art_start);
        for (coeffs, sense, rhs) in rows.drain(..) {
            let mut row = vec![Q::zero(); cols + 1];
            row[..n].clone_from_slice(&coeffs);
            row[cols] = rhs;
            match sense {
                Sense::Le => {
                    row[slack] = Q::one();
                    basis.push(slack);
                    slack += 1;
                }
                Sense::Ge => {
                    row[slack] = -Q::one();
                    slack += 1;
                    row[art] = Q::one();
                    basis.push(art);
                    art += 1;
                }
                Sense::Eq => {
                    row[art] = Q::one();
                    basis.push(art);
                    art += 1;
                }
            }
            tab_rows.push(row);
        }

        // Phase 1: minimize the sum of artificials.
        let mut obj = vec![Q::zero(); cols + 1];
        for v in obj[art_start..cols].iter_mut() {
            *v = Q::one();
        }
        for (r, row) in tab_rows.iter().enumerate() {
            if basis[r] >= art_start {
                for (o, v) in obj.iter_mut().zip(row) {
                    *o -= v;
                }
            }
        }
        let mut tab = Tableau { rows: tab_rows, obj, basis, cols };
        tab.optimize(&|_| true);
        if !tab.obj[cols].is_zero() {
            return LpOutcome::Infeasible;
        }

        // Drive remaining (zero-level) artificials out of the basis.
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] >= art_start {
                match (0..art_start).find(|&j| !tab.rows[r][j].is_zero()) {
                    Some(c) => tab.pivot(r, c),
                    None => {
                        tab.rows.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }

        // Phase 2.
        let mut obj = vec![Q::zero(); cols + 1];
        obj[..n].clone_from_slice(&self.objective);
        for (r, row) in tab.rows.iter().enumerate() {
            let b = tab.basis[r];
            if !obj[b].is_zero() {
                let f = obj[b].clone();
                for (o, v) in obj.iter_mut().zip(row) {
                    *o -= &f * v;
                }
            }
        }
        tab.obj = obj;
        if !tab.optimize(&|j| j < art_start) {
            return LpOutcome::Unbounded;
        }

        let mut x = vec![Q::zero(); n];
        for (r, &b) in tab.basis.iter().enumerate() {
            if b < n {
                x[b] = tab.rows[r][cols].clone();
            }
        }
        let value = self.objective_value(&x);
        LpOutcome::Optimal { x, value }
    }

    pub fn objective_value(&self, x: &[Q]) -> Q {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn is_feasible(&self, x: &[Q]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs: Q = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
                match c.sense {
                    Sense::Le => lhs <= c.rhs,
                    Sense::Ge => lhs >= c.rhs,
                    Sense::Eq => lhs == c.rhs,
                }
            })
    }

    /// The dual program, expressed again as a minimization over nonnegative
    /// variables. Dual variable `y_i` of constraint `i` is recovered from the
    /// dual solution by [`LinearProgram::dual_multipliers`].
    ///
    /// Primal `min c·x, Ax ⋈ b, x ≥ 0` has dual `max b·y, Aᵀy ≤ c` with
    /// `y_i ≥ 0` for `≥` rows, `y_i ≤ 0` for `≤` rows and `y_i` free for
    /// equalities.
    pub fn dual(&self) -> LinearProgram {
        let cols = self.dual_columns();
        let num_vars = cols.len();
        let objective = cols.iter().map(|&(i, sign)| -(&self.constraints[i].rhs * Q::from_integer(sign.into()))).collect();
        let constraints = (0..self.num_vars)
            .map(|j| Constraint {
                coeffs: cols
                    .iter()
                    .map(|&(i, sign)| &self.constraints[i].coeffs[j] * Q::from_integer(sign.into()))
                    .collect(),
                sense: Sense::Le,
                rhs: self.objective[j].clone(),
            })
            .collect();
        LinearProgram { num_vars, objective, constraints }
    }

    fn dual_columns(&self) -> Vec<(usize, i32)> {
        let mut cols = Vec::new();
        for (i, c) in self.constraints.iter().enumerate() {
            match c.sense {
                Sense::Ge => cols.push((i, 1)),
                Sense::Le => cols.push((i, -1)),
                Sense::Eq => {
                    cols.push((i, 1));
                    cols.push((i, -1));
                }
            }
        }
        cols
    }

    /// Maps a solution of [`LinearProgram::dual`] back to one multiplier per
    /// primal constraint.
    pub fn dual_multipliers(&self, dual_x: &[Q]) -> Vec<Q> {
        let mut y = vec![Q::zero(); self.constraints.len()];
        for (&(i, sign), v) in self.dual_columns().iter().zip(dual_x) {
            y[i] += v * Q::from_integer(sign.into());
        }
        y
    }

    /// Checks that `y` is dual feasible and that `b·y` equals `c·x` for a
    /// feasible `x`; by weak duality both are then optimal.
    pub fn certifies_optimality(&self, x: &[Q], y: &[Q]) -> bool {
        if !self.is_feasible(x) || y.len() != self.constraints.len() {
            return false;
        }
        let signs_ok = self.constraints.iter().zip(y).all(|(c, v)| match c.sense {
            Sense::Ge => !v.is_negative(),
            Sense::Le => !v.is_positive(),
            Sense::Eq => true,
        });
        let reduced_ok = (0..self.num_vars).all(|j| {
            let aty: Q = self.constraints.iter().zip(y).map(|(c, v)| &c.coeffs[j] * v).sum();
            aty <= self.objective[j]
        });
        let dual_value: Q = self.constraints.iter().zip(y).map(|(c, v)| &c.rhs * v).sum();
        signs_ok && reduced_ok && dual_value == self.objective_value(x)
    }
}
