//! Mean decorrelation along translations of affine lattices `Λ + x` in `ℝ²`.

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{accumulate, approx_haar_sample, check_samples, draw_torus, sample_rng, stream_id, Estimate};
use crate::error::{Error, Result};
use crate::lattice::{apply_flow, lattice_from_matrix, AdmissibleSet, FlowParam, UnimodularLattice};
use crate::testfns::{affine_siegel_transform, BumpSpec};

const TAG_AFFINE: u64 = 0x80_0000;

/// `Λ + x` with `x` stored in the fundamental parallelepiped of the reduced
/// basis of `Λ`.
#[derive(Clone, Debug)]
pub struct AffineLatticePoint {
    lattice: UnimodularLattice,
    offset: Vec<f64>,
    cell: Vec<f64>,
}

impl AffineLatticePoint {
    pub fn new(lattice: UnimodularLattice, offset: &[f64]) -> Result<Self> {
        if lattice.dim() != 2 || offset.len() != 2 {
            return Err(Error::Dimension { expected: 2, got: offset.len() });
        }
        let cell: Vec<f64> = lattice.reduction()?.coordinates(offset).into_iter().map(wrap_unit).collect();
        let offset = cell_to_offset(&lattice, &cell)?;
        Ok(AffineLatticePoint { lattice, offset, cell })
    }

    /// The point with offset `basis · cell`, `cell ∈ [0,1)²` in reduced coordinates.
    pub fn from_cell(lattice: UnimodularLattice, cell: [f64; 2]) -> Result<Self> {
        let offset = cell_to_offset(&lattice, &cell)?;
        Self::new(lattice, &offset)
    }

    pub fn lattice(&self) -> &UnimodularLattice {
        &self.lattice
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    /// Coordinates of the offset in the reduced basis, in `[0, 1)`.
    pub fn cell(&self) -> &[f64] {
        &self.cell
    }

    /// `Λ + x + shift`.
    pub fn translate(&self, shift: &[f64]) -> Result<Self> {
        let x: Vec<f64> = self.offset.iter().zip(shift).map(|(a, b)| a + b).collect();
        Self::new(self.lattice.clone(), &x)
    }
}

fn wrap_unit(c: f64) -> f64 {
    let r = c.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

fn cell_to_offset(lattice: &UnimodularLattice, cell: &[f64]) -> Result<Vec<f64>> {
    let basis = lattice.reduction()?.basis();
    Ok((basis * DVector::from_column_slice(cell)).iter().copied().collect())
}

/// A real function on the space of affine lattices in `ℝ²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AffineObservable {
    Constant { value: f64 },
    /// `Σ_{v ∈ Λ} ρ(v + x)`; its fiber average is `∫ρ`.
    Siegel(BumpSpec),
    /// `ρ(c − (½, ½))` with `c` the reduced cell coordinates of `x`; its
    /// fiber average is `∫_{[0,1]²} ρ(c − (½, ½)) dc`.
    CellBump(BumpSpec),
}

impl AffineObservable {
    fn check(&self) -> Result<()> {
        match self {
            AffineObservable::Siegel(b) | AffineObservable::CellBump(b) if b.dim != 2 => {
                Err(Error::Dimension { expected: 2, got: b.dim })
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, z: &AffineLatticePoint) -> Result<f64> {
        match self {
            AffineObservable::Constant { value } => Ok(*value),
            AffineObservable::Siegel(spec) => affine_siegel_transform(spec, &z.lattice, &z.offset),
            AffineObservable::CellBump(spec) => Ok(spec.eval(&[z.cell[0] - 0.5, z.cell[1] - 0.5])),
        }
    }

    /// The fiber average `φ*`, which is the same for every `Λ`.
    pub fn fiber_average(&self) -> f64 {
        match self {
            AffineObservable::Constant { value } => *value,
            AffineObservable::Siegel(spec) => spec.integral(),
            AffineObservable::CellBump(spec) if spec.radius <= 0.5 => spec.integral(),
            AffineObservable::CellBump(spec) => {
                let k = 1024;
                let h = 1.0 / k as f64;
                let mut sum = 0.0;
                for i in 0..k {
                    for j in 0..k {
                        sum += spec.eval(&[(i as f64 + 0.5) * h - 0.5, (j as f64 + 0.5) * h - 0.5]);
                    }
                }
                sum * h * h
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineOptions {
    /// Midpoint nodes per `u` axis.
    pub grid: usize,
    /// Offsets drawn per fiber for the main term.
    pub fiber_samples: usize,
}

impl Default for AffineOptions {
    fn default() -> Self {
        AffineOptions { grid: 64, fiber_samples: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineDecorrelation {
    /// `(1/L²)∬ ∫ φ(σ(u₁)z)·ψ(σ(u₂)z) dμ du₁ du₂`.
    pub correlation: Estimate,
    /// `∫ φ*·ψ* dμ`.
    pub main: Estimate,
    /// Paired estimate of `correlation − main`.
    pub gap: Estimate,
    /// `L·|w|`.
    pub scale: f64,
}

/// Samples `Λ` by `approx_haar_sample(2, horizon)` and `x` uniform on its
/// fiber. The `u` double average runs over a midpoint grid; it factors into
/// the product of two single averages because the integrand does.
#[allow(clippy::too_many_arguments)]
pub fn affine_mean_decorrelation(
    phi: &AffineObservable,
    psi: &AffineObservable,
    w: [f64; 2],
    length: f64,
    horizon: f64,
    n: u64,
    seed: u64,
    opts: AffineOptions,
) -> Result<AffineDecorrelation> {
    check_samples(n)?;
    phi.check()?;
    psi.check()?;
    let norm_w = w[0].hypot(w[1]);
    if !(norm_w > 0.0 && norm_w.is_finite()) {
        return Err(Error::domain("translation direction w must be nonzero"));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::domain(format!("averaging length must be positive, got {length}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain(format!("horizon must be positive, got {horizon}")));
    }
    if opts.grid == 0 || opts.fiber_samples == 0 {
        return Err(Error::domain("grid and fiber sample counts must be positive"));
    }
    let t = FlowParam::uniform_on(&AdmissibleSet::full(1, 1), horizon)?;
    let k = opts.grid;
    let ws = accumulate(n, |i| {
        let mut rng = sample_rng(seed, stream_id(TAG_AFFINE, i));
        let b = draw_torus(1, 1, &mut rng);
        let lattice = apply_flow(&t, &lattice_from_matrix(&b))?;
        let z = AffineLatticePoint::from_cell(lattice, [rng.random(), rng.random()])?;
        let (mut a_phi, mut a_psi) = (0.0, 0.0);
        for j in 0..k {
            let u = (j as f64 + 0.5) / k as f64 * length;
            let zu = z.translate(&[u * w[0], u * w[1]])?;
            a_phi += phi.eval(&zu)?;
            a_psi += psi.eval(&zu)?;
        }
        let corr = (a_phi / k as f64) * (a_psi / k as f64);
        let mut fiber_mean = |f: &AffineObservable| -> Result<f64> {
            let mut s = 0.0;
            for _ in 0..opts.fiber_samples {
                let y = AffineLatticePoint::from_cell(z.lattice.clone(), [rng.random(), rng.random()])?;
                s += f.eval(&y)?;
            }
            Ok(s / opts.fiber_samples as f64)
        };
        let main = fiber_mean(phi)? * fiber_mean(psi)?;
        Ok([corr, main, corr - main])
    })?;
    Ok(AffineDecorrelation {
        correlation: Estimate::from_welford(&ws[0], seed),
        main: Estimate::from_welford(&ws[1], seed),
        gap: Estimate::from_welford(&ws[2], seed),
        scale: length * norm_w,
    })
}

/// Draws `Λ` exactly as [`affine_mean_decorrelation`] does.
pub fn affine_lattice_sample(horizon: f64, seed: u64, index: u64) -> Result<UnimodularLattice> {
    approx_haar_sample(1, 1, horizon, seed, index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn skew() -> UnimodularLattice {
        UnimodularLattice::new(DMatrix::from_row_slice(2, 2, &[1.3, 0.4, 0.2, 1.0 / 1.3 + 0.4 * 0.2 / 1.3])).unwrap()
    }

    #[test]
    fn offsets_are_reduced() {
        let l = skew();
        let z = AffineLatticePoint::new(l.clone(), &[5.3, -7.1]).unwrap();
        assert!(z.cell().iter().all(|c| (0.0..1.0).contains(c)));
        let diff: Vec<f64> = z.offset().iter().zip([5.3, -7.1]).map(|(a, b)| a - b).collect();
        assert!(l.contains(&diff, 1e-9).unwrap());
    }

    #[test]
    fn constants_have_no_gap() {
        let c = AffineObservable::Constant { value: 1.5 };
        let r = affine_mean_decorrelation(&c, &c, [1.0, 0.3], 2.0, 4.0, 50, 1, AffineOptions::default()).unwrap();
        assert_eq!(r.correlation.mean, 2.25);
        assert_eq!(r.main.mean, 2.25);
        assert_eq!(r.gap.mean, 0.0);
    }

    #[test]
    fn cell_bump_fiber_average() {
        let big = AffineObservable::CellBump(BumpSpec::new(2, 0.8, 2, 1.0).unwrap());
        // direct 2-D midpoint quadrature over the unit cell, coarser than the reference
        let spec = BumpSpec::new(2, 0.8, 2, 1.0).unwrap();
        let k = 300;
        let mut q = 0.0;
        for i in 0..k {
            for j in 0..k {
                q += spec.eval(&[(i as f64 + 0.5) / k as f64 - 0.5, (j as f64 + 0.5) / k as f64 - 0.5]);
            }
        }
        q /= (k * k) as f64;
        assert!((big.fiber_average() - q).abs() < 1e-5);
        let small = AffineObservable::CellBump(BumpSpec::new(2, 0.4, 2, 1.0).unwrap());
        assert!((small.fiber_average() - BumpSpec::new(2, 0.4, 2, 1.0).unwrap().integral()).abs() < 1e-15);
    }

    #[test]
    fn offset_sampler_matches_cell_quadrature() {
        // bump of the offset in the plane, not periodized
        let l = skew();
        let spec = BumpSpec::new(2, 0.9, 2, 1.0).unwrap();
        let center = [0.7, 0.5];
        let f = |x: &[f64]| spec.eval(&[x[0] - center[0], x[1] - center[1]]);
        let [w] = accumulate(40_000, |i| {
            let mut rng = sample_rng(3, i);
            let z = AffineLatticePoint::from_cell(l.clone(), [rng.random(), rng.random()]).unwrap();
            Ok([f(z.offset())])
        })
        .unwrap();
        let basis = l.reduction().unwrap().basis().clone();
        let k = 400;
        let mut q = 0.0;
        for i in 0..k {
            for j in 0..k {
                let c = DVector::from_vec(vec![(i as f64 + 0.5) / k as f64, (j as f64 + 0.5) / k as f64]);
                let x = &basis * c;
                q += f(x.as_slice());
            }
        }
        q /= (k * k) as f64;
        assert!((w.mean - q).abs() <= 3.0 * w.stderr(), "{} vs {q} ± {}", w.mean, w.stderr());
    }

    #[test]
    fn lattice_sampler_is_shared() {
        let a = affine_lattice_sample(3.0, 4, 9).unwrap();
        let b = approx_haar_sample(1, 1, 3.0, 4, 9).unwrap();
        assert_eq!(a.basis(), b.basis());
    }

    #[test]
    fn bad_inputs() {
        let c = AffineObservable::Constant { value: 1.0 };
        let o = AffineOptions::default();
        assert!(affine_mean_decorrelation(&c, &c, [0.0, 0.0], 1.0, 4.0, 10, 1, o).is_err());
        assert!(affine_mean_decorrelation(&c, &c, [1.0, 0.0], 0.0, 4.0, 10, 1, o).is_err());
        let bad = AffineObservable::Siegel(BumpSpec::standard(3));
        assert!(affine_mean_decorrelation(&bad, &c, [1.0, 0.0], 1.0, 4.0, 10, 1, o).is_err());
    }
}
