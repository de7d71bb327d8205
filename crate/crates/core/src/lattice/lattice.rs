use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::flow::{flow_diagonal, FlowParam};
use super::reduce::{self, Reduction};
use crate::error::{Error, Result};

/// Relative tolerance on `|det| = 1`.
pub const UNIMODULAR_TOL: f64 = 1e-9;

/// A point `B ∈ Mat_{m×n}(ℝ/ℤ)`, stored row-major with entries in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    m: usize,
    n: usize,
    entries: Vec<f64>,
}

impl TorusPoint {
    /// Entries are reduced mod 1.
    pub fn new(m: usize, n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != m * n {
            return Err(Error::Dimension { expected: m * n, got: entries.len() });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::invariant("torus entries must be finite"));
        }
        let entries = entries
            .into_iter()
            .map(|x| {
                let r = x.rem_euclid(1.0);
                // rem_euclid can round up to exactly 1.0 for tiny negative inputs
                if r >= 1.0 {
                    0.0
                } else {
                    r
                }
            })
            .collect();
        Ok(TorusPoint { m, n, entries })
    }

    pub fn zero(m: usize, n: usize) -> Self {
        TorusPoint { m, n, entries: vec![0.0; m * n] }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// 0-based `(row, col)` entry.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }
}

/// A lattice in `ℝ^d` given by a basis whose columns generate it.
#[derive(Clone, Debug)]
pub struct UnimodularLattice {
    basis: DMatrix<f64>,
    reduced: OnceLock<Reduction>,
}

impl PartialEq for UnimodularLattice {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis
    }
}

impl UnimodularLattice {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::Dimension { expected: basis.nrows(), got: basis.ncols() });
        }
        if basis.iter().any(|x| !x.is_finite()) {
            return Err(Error::invariant("basis has non-finite entries"));
        }
        let det = basis.determinant();
        if (det.abs() - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::invariant(format!("basis determinant {det} is not ±1")));
        }
        Ok(Self::from_trusted(basis))
    }

    pub(crate) fn from_trusted(basis: DMatrix<f64>) -> Self {
        UnimodularLattice { basis, reduced: OnceLock::new() }
    }

    pub fn standard(dim: usize) -> Self {
        Self::from_trusted(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// LLL reduction, computed once and cached.
    pub fn reduction(&self) -> Result<&Reduction> {
        if let Some(r) = self.reduced.get() {
            return Ok(r);
        }
        let r = reduce::lll(&self.basis)?;
        Ok(self.reduced.get_or_init(|| r))
    }

    /// Whether `v` lies in the lattice, up to `tol` in basis coordinates.
    pub fn contains(&self, v: &[f64], tol: f64) -> Result<bool> {
        let red = self.reduction()?;
        let coeffs = red.coordinates(v);
        Ok(coeffs.iter().all(|c| (c - c.round()).abs() <= tol))
    }
}

/// `Λ_B = {(p + Bq, q)}` with basis `[[I_m, B], [0, I_n]]`.
pub fn lattice_from_matrix(b: &TorusPoint) -> UnimodularLattice {
    let (m, n) = (b.m, b.n);
    let mut basis = DMatrix::identity(m + n, m + n);
    for i in 0..m {
        for j in 0..n {
            basis[(i, m + j)] = b.get(i, j);
        }
    }
    UnimodularLattice::from_trusted(basis)
}

/// `a(t)·L`: row `i` of the basis is scaled by the `i`-th flow exponent.
pub fn apply_flow(t: &FlowParam, lattice: &UnimodularLattice) -> Result<UnimodularLattice> {
    if t.dim() != lattice.dim() {
        return Err(Error::Dimension { expected: lattice.dim(), got: t.dim() });
    }
    let mut basis = lattice.basis.clone();
    for (i, scale) in flow_diagonal(t).into_iter().enumerate() {
        basis.row_mut(i).scale_mut(scale);
    }
    Ok(UnimodularLattice::from_trusted(basis))
}

/// The dual lattice `Λ^⊥`, with basis the inverse transpose.
pub fn dual_lattice(lattice: &UnimodularLattice) -> Result<UnimodularLattice> {
    let inv = lattice.basis.clone().try_inverse().ok_or(Error::Singular)?;
    if inv.iter().any(|x| !x.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(UnimodularLattice::from_trusted(inv.transpose()))
}

/// Sup-norm of the shortest nonzero vector.
pub fn shortest_vector_length(lattice: &UnimodularLattice) -> Result<f64> {
    lattice.reduction()?.shortest_sup_norm()
}
