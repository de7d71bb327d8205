//! Observables on the space of lattices and on the torus `Y`.
//!
//! Lattice observables are Siegel transforms of the polynomial bump
//! `ρ(v) = a·max(0, 1 − |v|²/R²)^p`, whose lattice sums are finite and whose
//! integral has a closed form. Torus observables are trigonometric
//! polynomials.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::lattice::{TorusPoint, UnimodularLattice};

/// The polynomial bump `ρ(v) = amplitude·max(0, 1 − |v|²/radius²)^power`,
/// with `|·|` the Euclidean norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBump")]
pub struct BumpSpec {
    pub dim: usize,
    pub radius: f64,
    pub power: u32,
    pub amplitude: f64,
}

#[derive(Deserialize)]
struct RawBump {
    dim: usize,
    #[serde(default = "default_radius")]
    radius: f64,
    #[serde(default = "default_power")]
    power: u32,
    #[serde(default = "default_amplitude")]
    amplitude: f64,
}

fn default_radius() -> f64 {
    2.0
}

fn default_power() -> u32 {
    2
}

fn default_amplitude() -> f64 {
    1.0
}

impl TryFrom<RawBump> for BumpSpec {
    type Error = Error;
    fn try_from(r: RawBump) -> Result<Self> {
        BumpSpec::new(r.dim, r.radius, r.power, r.amplitude)
    }
}

impl BumpSpec {
    pub fn new(dim: usize, radius: f64, power: u32, amplitude: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invariant("bump dimension must be positive"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invariant(format!("bump radius must be positive, got {radius}")));
        }
        if power < 2 {
            return Err(Error::invariant(format!("bump power must be at least 2, got {power}")));
        }
        if !amplitude.is_finite() {
            return Err(Error::invariant("bump amplitude must be finite"));
        }
        Ok(BumpSpec { dim, radius, power, amplitude })
    }

    /// Radius 2, power 2, amplitude 1.
    pub fn standard(dim: usize) -> Self {
        BumpSpec { dim, radius: 2.0, power: 2, amplitude: 1.0 }
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        self.eval_norm2(v.iter().map(|x| x * x).sum())
    }

    fn eval_norm2(&self, r2: f64) -> f64 {
        let u = 1.0 - r2 / (self.radius * self.radius);
        if u <= 0.0 {
            0.0
        } else {
            self.amplitude * u.powi(self.power as i32)
        }
    }

    /// `∫_{ℝ^d} ρ = a·R^d·π^{d/2}·Γ(p+1)/Γ(p+1+d/2)`.
    pub fn integral(&self) -> f64 {
        let d = self.dim as f64;
        let p = self.power as f64;
        let log = d * self.radius.ln() + 0.5 * d * PI.ln() + ln_gamma(p + 1.0) - ln_gamma(p + 1.0 + 0.5 * d);
        self.amplitude * log.exp()
    }

    /// Grid approximation of `sup |∂₁^order ρ|` along the first axis, from
    /// central differences with step `h = radius / samples`. Because `ρ` is
    /// radial and decreasing, this is a lower estimate of the `C^order` norm.
    pub fn grid_derivative_sup(&self, order: u32, samples: usize) -> f64 {
        let h = self.radius / samples.max(1) as f64;
        let line = |x: f64| self.eval_norm2(x * x);
        let mut best = 0.0f64;
        for k in -(2 * samples as i64)..=(2 * samples as i64) {
            let x = k as f64 * h;
            best = best.max(central_difference(&line, x, h, order).abs());
        }
        best
    }
}

/// `order`-th central difference of `f` at `x`, scaled by `h^{-order}`.
pub fn central_difference(f: &dyn Fn(f64) -> f64, x: f64, h: f64, order: u32) -> f64 {
    let k = order as i64;
    let mut acc = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom * f(x + (k as f64 / 2.0 - j as f64) * h);
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    acc / h.powi(order as i32)
}

pub fn bump_eval(spec: &BumpSpec, v: &[f64]) -> f64 {
    assert_eq!(v.len(), spec.dim, "bump dimension mismatch");
    spec.eval(v)
}

/// `Σ_{v ∈ Λ∖0} ρ(v)`.
pub fn siegel_transform(spec: &BumpSpec, lattice: &UnimodularLattice) -> Result<f64> {
    if lattice.dim() != spec.dim {
        return Err(Error::Dimension { expected: spec.dim, got: lattice.dim() });
    }
    let mut sum = 0.0;
    lattice.reduction()?.for_each_in_ball(None, spec.radius, |x, v| {
        if x.iter().any(|&c| c != 0) {
            sum += spec.eval(v);
        }
    })?;
    Ok(sum)
}

/// `Σ_{v ∈ Λ} ρ(v + x)`, the transform of the affine lattice `Λ + x`.
pub fn affine_siegel_transform(spec: &BumpSpec, lattice: &UnimodularLattice, offset: &[f64]) -> Result<f64> {
    if lattice.dim() != spec.dim || offset.len() != spec.dim {
        return Err(Error::Dimension { expected: spec.dim, got: offset.len() });
    }
    let center: Vec<f64> = offset.iter().map(|x| -x).collect();
    let mut sum = 0.0;
    lattice.reduction()?.for_each_in_ball(Some(&center), spec.radius, |_, v| {
        let w: f64 = v.iter().zip(offset).map(|(a, b)| (a + b) * (a + b)).sum();
        sum += spec.eval_norm2(w);
    })?;
    Ok(sum)
}

/// `e^{2πi⟨k, B⟩}` with the entrywise pairing on `m×n` matrices.
pub fn character_eval(k: &[i64], b: &TorusPoint) -> Complex64 {
    assert_eq!(k.len(), b.entries().len(), "frequency shape mismatch");
    let phase: f64 = k.iter().zip(b.entries()).map(|(&k, &x)| k as f64 * x).sum();
    Complex64::from_polar(1.0, 2.0 * PI * phase.rem_euclid(1.0))
}

/// `sin²(x)/x²`, continuous at 0.
pub fn omega_kernel(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 45.0
    } else {
        let s = x.sin() / x;
        s * s
    }
}

/// A finitely supported Fourier series on `Mat_{m×n}(ℝ/ℤ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrigPoly", into = "RawTrigPoly")]
pub struct TrigPoly {
    m: usize,
    n: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawTrigPoly {
    m: usize,
    n: usize,
    coeffs: Vec<Vec<f64>>,
}

impl TryFrom<RawTrigPoly> for TrigPoly {
    type Error = Error;
    fn try_from(raw: RawTrigPoly) -> Result<Self> {
        let d = raw.m * raw.n;
        let mut terms = Vec::with_capacity(raw.coeffs.len());
        for row in raw.coeffs {
            if row.len() != d + 2 {
                return Err(Error::Config(format!(
                    "trig coefficient rows need {d} frequencies plus re, im; got {} numbers",
                    row.len()
                )));
            }
            let mut k = Vec::with_capacity(d);
            for &x in &row[..d] {
                if x.fract() != 0.0 || x.abs() > 1e12 {
                    return Err(Error::Config(format!("frequency {x} is not an integer")));
                }
                k.push(x as i64);
            }
            terms.push((k, Complex64::new(row[d], row[d + 1])));
        }
        TrigPoly::new(raw.m, raw.n, terms)
    }
}

impl From<TrigPoly> for RawTrigPoly {
    fn from(p: TrigPoly) -> Self {
        let coeffs = p
            .coeffs
            .iter()
            .map(|(k, c)| k.iter().map(|&x| x as f64).chain([c.re, c.im]).collect())
            .collect();
        RawTrigPoly { m: p.m, n: p.n, coeffs }
    }
}

impl TrigPoly {
    /// Repeated frequencies are summed; zero coefficients are dropped.
    pub fn new(m: usize, n: usize, terms: impl IntoIterator<Item = (Vec<i64>, Complex64)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            if k.len() != m * n {
                return Err(Error::Dimension { expected: m * n, got: k.len() });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::invariant("trig coefficients must be finite"));
            }
            *coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| c.norm_sqr() > 0.0);
        Ok(TrigPoly { m, n, coeffs })
    }

    pub fn constant(m: usize, n: usize, c: f64) -> Self {
        TrigPoly::new(m, n, [(vec![0; m * n], Complex64::new(c, 0.0))]).expect("shape is consistent")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], Complex64)> {
        self.coeffs.iter().map(|(k, c)| (k.as_slice(), *c))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, b: &TorusPoint) -> Complex64 {
        self.terms().map(|(k, c)| c * character_eval(k, b)).sum()
    }

    /// The coefficient map of the pointwise product.
    pub fn product(&self, other: &TrigPoly) -> Result<TrigPoly> {
        if (self.m, self.n) != (other.m, other.n) {
            return Err(Error::Dimension { expected: self.m * self.n, got: other.m * other.n });
        }
        let terms = self.terms().flat_map(|(k1, c1)| {
            other
                .terms()
                .map(move |(k2, c2)| (k1.iter().zip(k2).map(|(a, b)| a + b).collect(), c1 * c2))
        });
        TrigPoly::new(self.m, self.n, terms.collect::<Vec<_>>())
    }

    /// `‖f‖_{L²(Y)}` by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Whether `f̂(−k) = conj f̂(k)` for every `k`, within `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.terms().all(|(k, c)| {
            let neg: Vec<i64> = k.iter().map(|x| -x).collect();
            (self.coeff(&neg) - c.conj()).norm() <= tol
        })
    }
}

/// `‖f‖_W = Σ |f̂(ξ)|`.
pub fn wiener_norm(f: &TrigPoly) -> f64 {
    f.coeffs.values().map(|c| c.norm()).sum()
}
