//! Exact mean decorrelation of characters averaged over `[0, L]` on the circle.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::testfns::{omega_kernel, TrigPoly};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleDecorrelation {
    /// `(1/L²)∫₀^L∫₀^L ∫ φ(x + u₁)·conj ψ(x + u₂) dx du₁ du₂`.
    pub value: Complex64,
    /// `φ̂(0)·conj ψ̂(0)`.
    pub main: Complex64,
    pub gap: Complex64,
    /// `Σ_{n≠0} |φ̂(n)||ψ̂(n)|·(πLn)^{-2}`.
    pub coefficient_bound: f64,
    /// `‖φ‖₂‖ψ‖₂·(πL)^{-2}·Σ n^{-2}` over nonzero `n` where both spectra live.
    pub l2_bound: f64,
}

/// Closed form: each frequency `n` contributes `φ̂(n)·conj ψ̂(n)·ω(πLn)`.
pub fn circle_mean_decorrelation(phi: &TrigPoly, psi: &TrigPoly, length: f64) -> Result<CircleDecorrelation> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::domain(format!("averaging length must be positive, got {length}")));
    }
    for f in [phi, psi] {
        if (f.m(), f.n()) != (1, 1) {
            return Err(Error::Dimension { expected: 1, got: f.m() * f.n() });
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    let main = phi.coeff(&[0]) * psi.coeff(&[0]).conj();
    let mut gap = zero;
    let mut coefficient_bound = 0.0;
    let mut inv_sq = 0.0;
    for (k, a) in phi.terms() {
        let n = k[0];
        let b = psi.coeff(k);
        if n == 0 || b == zero {
            continue;
        }
        let x = PI * length * n as f64;
        gap += a * b.conj() * omega_kernel(x);
        coefficient_bound += a.norm() * b.norm() / (x * x);
        inv_sq += 1.0 / (n as f64 * n as f64);
    }
    let l2_bound = phi.l2_norm() * psi.l2_norm() * inv_sq / (PI * length).powi(2);
    Ok(CircleDecorrelation { value: main + gap, main, gap, coefficient_bound, l2_bound })
}
