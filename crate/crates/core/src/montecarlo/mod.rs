//! Deterministic parallel Monte Carlo estimators.
//!
//! Every random draw comes from a ChaCha8 stream keyed by the master seed
//! and a 64-bit stream id `(tag << 40) ^ index`, where `tag` names the
//! estimator (and factor) and `index` is the sample number. Samples are
//! accumulated in fixed blocks merged by a fixed tree, so results are
//! bit-identical for any number of worker threads.

mod accumulate;
mod affine;
mod circle;
mod correlation;
mod observable;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use accumulate::{accumulate, Estimate, Welford, BLOCK};
pub use affine::{affine_lattice_sample, affine_mean_decorrelation, AffineDecorrelation, AffineLatticePoint, AffineObservable, AffineOptions};
pub use circle::{circle_mean_decorrelation, CircleDecorrelation};
pub use correlation::{
    approx_haar_sample, decay_sweep, decorrelation_gap, estimate_haar_integral, estimate_joint_correlation,
    estimate_muI_integral, estimate_nu_integral, fit_decay, DecayFit, Gap, MuIEstimate, SweepResult, SweepRow,
};
pub use observable::{Observable, Part};

use crate::error::{Error, Result};
use crate::lattice::TorusPoint;

/// Indices must stay below `2^40` so that tags and indices never collide.
pub const INDEX_BITS: u32 = 40;

pub fn stream_id(tag: u64, index: u64) -> u64 {
    debug_assert!(index < 1 << INDEX_BITS);
    (tag << INDEX_BITS) ^ index
}

/// The generator for one sample.
pub fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A uniform point of `Mat_{m×n}(ℝ/ℤ)` from the stream `(seed, stream)`.
pub fn sample_torus(m: usize, n: usize, seed: u64, stream: u64) -> TorusPoint {
    draw_torus(m, n, &mut sample_rng(seed, stream))
}

pub(crate) fn draw_torus(m: usize, n: usize, rng: &mut ChaCha8Rng) -> TorusPoint {
    let entries = (0..m * n).map(|_| rng.random::<f64>()).collect();
    TorusPoint::new(m, n, entries).expect("uniform draws are finite")
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Internal(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

pub(crate) fn check_samples(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 samples, got {n}")));
    }
    if n >= 1 << INDEX_BITS {
        return Err(Error::domain(format!("sample count {n} exceeds the stream index range")));
    }
    Ok(())
}
