//! Decorrelation of two Siegel-transform translates on `Y = ℝ/ℤ` as the
//! second translate moves away along the flow, with a fitted decay rate.
//!
//! `cargo run --release --example decay_sweep -- [N] [seed] [base]`

use diagflow::lattice::FlowParam;
use diagflow::montecarlo::{decay_sweep, Observable};
use diagflow::testfns::BumpSpec;

fn main() -> diagflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2024);
    let start: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3.0);

    let phi = Observable::Siegel(BumpSpec::standard(2));
    let base = FlowParam::new(1, 1, vec![start, start])?;
    let direction = FlowParam::new(1, 1, vec![1.0, 1.0])?;
    let grid: Vec<f64> = (0..=8).map(f64::from).collect();

    let sweep = decay_sweep(&[phi.clone(), phi], &[base.clone(), base], &direction, &grid, n, seed)?;
    println!("{:>5} {:>12} {:>11} {:>11} {:>10}", "delta", "gap", "stderr", "max", "");
    for row in &sweep.rows {
        let tag = if row.noise_limited { "noise" } else { "" };
        println!("{:>5} {:>12.5e} {:>11.3e} {:>11.3e} {:>10}", row.delta, row.gap, row.stderr, row.max_sample, tag);
    }
    match &sweep.fit {
        Some(fit) => println!(
            "fitted eta = {:.4} ± {} over {} rows",
            fit.fitted_eta,
            fit.fit_stderr.map_or("n/a".into(), |s| format!("{s:.4}")),
            fit.rows_used
        ),
        None => println!("fit unavailable: fewer than two rows above noise"),
    }
    Ok(())
}
