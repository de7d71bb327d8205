//! One-pass moment accumulation with a deterministic merge order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples per block. Blocks are the unit of parallel work and of merging.
pub const BLOCK: u64 = 256;

/// Running count, mean, centered second moment and maximum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Welford {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub max: f64,
}

impl Default for Welford {
    fn default() -> Self {
        Welford { count: 0, mean: 0.0, m2: 0.0, max: f64::NEG_INFINITY }
    }
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self.max = self.max.max(x);
    }

    /// Chan's pairwise combination.
    pub fn merge(&self, other: &Welford) -> Welford {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let n = self.count + other.count;
        let (na, nb) = (self.count as f64, other.count as f64);
        let delta = other.mean - self.mean;
        Welford {
            count: n,
            mean: self.mean + delta * nb / n as f64,
            m2: self.m2 + other.m2 + delta * delta * na * nb / n as f64,
            max: self.max.max(other.max),
        }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
    /// Largest single sample, exposing heavy tails.
    pub max_sample: f64,
}

impl Estimate {
    pub fn from_welford(w: &Welford, seed: u64) -> Self {
        Estimate { mean: w.mean, stderr: w.stderr(), n_samples: w.count, seed, max_sample: w.max }
    }

    /// `|mean − target| ≤ k·stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }
}

fn tree_merge<const K: usize>(parts: &[[Welford; K]]) -> [Welford; K] {
    match parts.len() {
        0 => [Welford::default(); K],
        1 => parts[0],
        len => {
            let (l, r) = parts.split_at(len / 2);
            let (a, b) = (tree_merge(l), tree_merge(r));
            std::array::from_fn(|k| a[k].merge(&b[k]))
        }
    }
}

/// Evaluates `sample(i)` for `i in 0..n` and accumulates each of its `K`
/// components. Blocks run in parallel and are merged by a fixed binary tree
/// over block indices, so the result does not depend on the thread count.
pub fn accumulate<const K: usize, F>(n: u64, sample: F) -> Result<[Welford; K]>
where
    F: Fn(u64) -> Result<[f64; K]> + Sync,
{
    let blocks = n.div_ceil(BLOCK);
    let parts: Vec<[Welford; K]> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = [Welford::default(); K];
            for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
                let xs = sample(i)?;
                for (a, &x) in acc.iter_mut().zip(&xs) {
                    if !x.is_finite() {
                        return Err(Error::Numerical(format!("non-finite sample {x} at index {i}")));
                    }
                    a.push(x);
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(tree_merge(&parts))
}
