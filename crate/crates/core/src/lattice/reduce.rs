//! LLL reduction with an integer change-of-basis certificate, and
//! Fincke–Pohst enumeration of lattice points in Euclidean balls.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const LLL_DELTA: f64 = 0.99;

const MAX_LLL_STEPS: usize = 100_000;

/// Upper bound on enumeration nodes visited per call; exceeding it means the
/// lattice is too deep in the cusp for the requested radius.
pub const MAX_ENUM_NODES: usize = 50_000_000;

/// An LLL-reduced basis `reduced = original · transform` with
/// `transform ∈ GL_d(ℤ)`, plus its Gram–Schmidt data.
#[derive(Clone, Debug)]
pub struct Reduction {
    basis: DMatrix<f64>,
    transform: DMatrix<i64>,
    gs_norm2: Vec<f64>,
    // mu[i * d + j] = <b_i, b*_j> / |b*_j|^2 for j < i
    mu: Vec<f64>,
    inverse: DMatrix<f64>,
}

fn gram_schmidt(b: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let d = b.ncols();
    let mut stars: Vec<DVector<f64>> = Vec::with_capacity(d);
    let mut norm2 = vec![0.0; d];
    let mut mu = vec![0.0; d * d];
    for i in 0..d {
        let bi = b.column(i).into_owned();
        let mut star = bi.clone();
        for j in 0..i {
            let m = if norm2[j] > 0.0 { bi.dot(&stars[j]) / norm2[j] } else { 0.0 };
            mu[i * d + j] = m;
            star.axpy(-m, &stars[j], 1.0);
        }
        norm2[i] = star.norm_squared();
        stars.push(star);
    }
    (norm2, mu)
}

fn checked_col_sub(t: &mut DMatrix<i64>, k: usize, j: usize, q: i64) -> Result<()> {
    for row in 0..t.nrows() {
        let v = q
            .checked_mul(t[(row, j)])
            .and_then(|x| t[(row, k)].checked_sub(x))
            .ok_or_else(|| Error::Reduction("change-of-basis entry overflow".into()))?;
        t[(row, k)] = v;
    }
    Ok(())
}

pub fn lll(original: &DMatrix<f64>) -> Result<Reduction> {
    let d = original.ncols();
    let mut b = original.clone();
    let mut t = DMatrix::<i64>::identity(d, d);
    let (mut norm2, mut mu) = gram_schmidt(&b);
    check_gs(&norm2)?;

    let mut k = 1;
    let mut steps = 0;
    while k < d {
        steps += 1;
        if steps > MAX_LLL_STEPS {
            return Err(Error::Reduction("LLL did not converge".into()));
        }
        for j in (0..k).rev() {
            let q = mu[k * d + j].round();
            if q != 0.0 {
                if q.abs() > 9.0e15 {
                    return Err(Error::Reduction("size-reduction coefficient overflow".into()));
                }
                let qi = q as i64;
                let bj = b.column(j).into_owned();
                b.column_mut(k).axpy(-q, &bj, 1.0);
                checked_col_sub(&mut t, k, j, qi)?;
                (norm2, mu) = gram_schmidt(&b);
            }
        }
        let m = mu[k * d + k - 1];
        if norm2[k] >= (LLL_DELTA - m * m) * norm2[k - 1] {
            k += 1;
        } else {
            b.swap_columns(k, k - 1);
            t.swap_columns(k, k - 1);
            (norm2, mu) = gram_schmidt(&b);
            check_gs(&norm2)?;
            k = k.saturating_sub(1).max(1);
        }
    }

    // Rebuild from the integer certificate so rounding drift in `b` does not
    // leak into the stored basis.
    let tf = t.map(|x| x as f64);
    let basis = original * tf;
    let (gs_norm2, mu) = gram_schmidt(&basis);
    check_gs(&gs_norm2)?;
    let inverse = basis.clone().try_inverse().ok_or(Error::Singular)?;
    if inverse.iter().any(|x| !x.is_finite()) {
        return Err(Error::Reduction("reduced basis is numerically singular".into()));
    }
    Ok(Reduction { basis, transform: t, gs_norm2, mu, inverse })
}

fn check_gs(norm2: &[f64]) -> Result<()> {
    if norm2.iter().any(|x| !x.is_finite() || *x <= 1e-300) {
        return Err(Error::Reduction("Gram–Schmidt norms degenerate (ill-conditioned basis)".into()));
    }
    Ok(())
}

impl Reduction {
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Integer matrix `U` with `reduced = original · U`.
    pub fn transform(&self) -> &DMatrix<i64> {
        &self.transform
    }

    pub fn gs_norms_squared(&self) -> &[f64] {
        &self.gs_norm2
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Real coordinates of `v` in the reduced basis.
    pub fn coordinates(&self, v: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(v);
        (&self.inverse * v).iter().copied().collect()
    }

    /// Visits every lattice vector `v` with `|v − center|₂ ≤ radius`, passing
    /// its integer coordinates (in the reduced basis) and the vector itself.
    /// The zero vector is included when it lies in the ball.
    pub fn for_each_in_ball<F>(&self, center: Option<&[f64]>, radius: f64, mut visit: F) -> Result<()>
    where
        F: FnMut(&[i64], &[f64]),
    {
        let d = self.dim();
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::domain("enumeration radius must be finite and nonnegative"));
        }
        let y = match center {
            Some(c) => {
                if c.len() != d {
                    return Err(Error::Dimension { expected: d, got: c.len() });
                }
                self.coordinates(c)
            }
            None => vec![0.0; d],
        };
        let mut state = Enum {
            d,
            r2: radius * radius * (1.0 + 1e-12) + 1e-300,
            y,
            x: vec![0; d],
            v: vec![0.0; d],
            nodes: 0,
            red: self,
        };
        state.recurse(d - 1, 0.0, &mut visit)
    }

    /// Minimum sup-norm over nonzero vectors. Any vector with sup-norm `s`
    /// has Euclidean length at most `√d·s`, so enumerating the Euclidean ball
    /// of radius `√d·min_k ‖b_k‖_∞` is exhaustive.
    pub fn shortest_sup_norm(&self) -> Result<f64> {
        let d = self.dim();
        let col_sup = |k: usize| self.basis.column(k).iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let mut best = (0..d).map(col_sup).fold(f64::INFINITY, f64::min);
        let radius = (d as f64).sqrt() * best;
        self.for_each_in_ball(None, radius, |x, v| {
            if x.iter().any(|&c| c != 0) {
                let s = v.iter().fold(0.0f64, |a, c| a.max(c.abs()));
                best = best.min(s);
            }
        })?;
        Ok(best)
    }
}

struct Enum<'a> {
    d: usize,
    r2: f64,
    y: Vec<f64>,
    x: Vec<i64>,
    v: Vec<f64>,
    nodes: usize,
    red: &'a Reduction,
}

impl Enum<'_> {
    fn recurse<F: FnMut(&[i64], &[f64])>(&mut self, i: usize, partial: f64, visit: &mut F) -> Result<()> {
        let d = self.d;
        let mut c = self.y[i];
        for j in i + 1..d {
            c -= self.red.mu[j * d + i] * (self.x[j] as f64 - self.y[j]);
        }
        let rem = self.r2 - partial;
        if rem < 0.0 {
            return Ok(());
        }
        let half = (rem / self.red.gs_norm2[i]).sqrt();
        let lo = (c - half).ceil();
        let hi = (c + half).floor();
        if lo > hi {
            return Ok(());
        }
        if hi - lo > 1e9 {
            return Err(Error::Numerical("enumeration range too large".into()));
        }
        let (lo, hi) = (lo as i64, hi as i64);
        for xi in lo..=hi {
            self.nodes += 1;
            if self.nodes > MAX_ENUM_NODES {
                return Err(Error::Numerical("lattice enumeration exceeded node budget".into()));
            }
            let z = xi as f64 - c;
            let p = partial + self.red.gs_norm2[i] * z * z;
            if p > self.r2 {
                continue;
            }
            self.x[i] = xi;
            if i == 0 {
                for row in 0..d {
                    let mut s = 0.0;
                    for col in 0..d {
                        s += self.red.basis[(row, col)] * self.x[col] as f64;
                    }
                    self.v[row] = s;
                }
                visit(&self.x, &self.v);
            } else {
                self.recurse(i - 1, p, visit)?;
            }
        }
        self.x[i] = 0;
        Ok(())
    }
}
