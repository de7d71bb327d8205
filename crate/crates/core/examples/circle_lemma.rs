//! Averaging two characters over `[0, L]` on the circle: the mean
//! decorrelation is `Σ φ̂(n)·conj ψ̂(n)·ω(πLn)` and obeys the `(πL)^{-2}` bound.

use diagflow::montecarlo::circle_mean_decorrelation;
use diagflow::testfns::{omega_kernel, TrigPoly};
use num_complex::Complex64;

fn main() -> diagflow::Result<()> {
    let e1 = TrigPoly::new(1, 1, [(vec![1], Complex64::new(1.0, 0.0))])?;
    println!("φ = ψ = e^(2πix)");
    println!("{:>6} {:>14} {:>14} {:>14}", "L", "gap", "ω(πL)", "(πL)^-2");
    for l in [0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 5.0, 10.0] {
        let d = circle_mean_decorrelation(&e1, &e1, l)?;
        let x = std::f64::consts::PI * l;
        println!("{l:>6} {:>14.6e} {:>14.6e} {:>14.6e}", d.gap.re, omega_kernel(x), x.powi(-2));
    }

    let phi = TrigPoly::new(
        1,
        1,
        [(vec![0], Complex64::new(1.0, 0.0)), (vec![1], Complex64::new(0.5, 0.5)), (vec![-3], Complex64::new(0.0, 2.0))],
    )?;
    let psi = TrigPoly::new(1, 1, [(vec![1], Complex64::new(1.0, 0.0)), (vec![-3], Complex64::new(1.0, -1.0))])?;
    println!("\nthree-term φ against two-term ψ");
    println!("{:>6} {:>14} {:>14} {:>14}", "L", "|gap|", "coef bound", "L2 bound");
    for l in [0.5, 1.3, 4.7, 12.1] {
        let d = circle_mean_decorrelation(&phi, &psi, l)?;
        println!("{l:>6} {:>14.6e} {:>14.6e} {:>14.6e}", d.gap.norm(), d.coefficient_bound, d.l2_bound);
    }
    Ok(())
}
