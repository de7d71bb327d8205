//! Siegel's mean value formula as a sampler check: the Siegel transform of a
//! bump, averaged over long flow translates of `Λ_B`, should match `∫ρ`,
//! and the answer should not move between horizons `T` and `T + 2`.
//!
//! `cargo run --release --example siegel_consistency -- [N] [seed]`

use diagflow::montecarlo::{estimate_haar_integral, Observable};
use diagflow::testfns::BumpSpec;

fn main() -> diagflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);

    for (m, k) in [(1, 1), (2, 1)] {
        let bump = BumpSpec::standard(m + k);
        let exact = bump.integral();
        let obs = Observable::Siegel(bump);
        println!("m = {m}, n = {k}: ∫ρ = {exact:.6}");
        let mut previous = None;
        for horizon in [4.0, 6.0, 8.0, 10.0] {
            let e = estimate_haar_integral(&obs, m, k, horizon, n, seed)?;
            let z = (e.mean - exact) / e.stderr;
            print!("  T = {horizon:>4}: {:.5} ± {:.5} ({z:+.2}σ from ∫ρ)", e.mean, e.stderr);
            if let Some((pm, ps)) = previous {
                let combined: f64 = f64::hypot(ps, e.stderr);
                print!(", shift from T-2 {:+.2}σ", (e.mean - pm) / combined);
            }
            println!();
            previous = Some((e.mean, e.stderr));
        }
    }
    Ok(())
}
