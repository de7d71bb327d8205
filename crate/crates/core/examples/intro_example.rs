//! Two translates of the 2×1 torus along `(s, 0, s)` and `(0, t, t)`
//! decorrelate into the product of the `X_I` integrals for `I = {1,3}` and
//! `{2,3}`, even though neither translate equidistributes in `X`.
//!
//! `cargo run --release --example intro_example -- [N] [seed] [s]`

use diagflow::lattice::{AdmissibleSet, FlowParam};
use diagflow::montecarlo::{estimate_haar_integral, estimate_joint_correlation, estimate_muI_integral, Observable};
use diagflow::testfns::BumpSpec;

fn main() -> diagflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(11);
    let s: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(6.0);

    let phi = Observable::Siegel(BumpSpec::standard(3));
    let t1 = FlowParam::new(2, 1, vec![s, 0.0, s])?;
    let t2 = FlowParam::new(2, 1, vec![0.0, s, s])?;
    let joint = estimate_joint_correlation(&[phi.clone(), phi.clone()], &[t1, t2], n, seed)?;

    let i1 = AdmissibleSet::new(2, 1, &[1, 3])?;
    let i2 = AdmissibleSet::new(2, 1, &[2, 3])?;
    let mu1 = estimate_muI_integral(&phi, &i1, s, n, seed)?.estimate;
    let mu2 = estimate_muI_integral(&phi, &i2, s, n, seed)?.estimate;
    let product = mu1.mean * mu2.mean;
    let product_err = f64::hypot(mu1.mean * mu2.stderr, mu2.mean * mu1.stderr);
    let haar = estimate_haar_integral(&phi, 2, 1, 8.0, n, seed)?;

    println!("joint ∫ φ(a(t1)y)φ(a(t2)y) dν      = {:.4} ± {:.4}", joint.mean, joint.stderr);
    println!("∫_X{{1,3}} φ · ∫_X{{2,3}} φ           = {product:.4} ± {product_err:.4}");
    println!("(∫_X φ dμ)²                        = {:.4} ± {:.4}", haar.mean.powi(2), 2.0 * haar.mean * haar.stderr);
    let combined = f64::hypot(joint.stderr, product_err);
    println!("joint − product = {:+.4} ({:+.2} combined σ)", joint.mean - product, (joint.mean - product) / combined);
    Ok(())
}
