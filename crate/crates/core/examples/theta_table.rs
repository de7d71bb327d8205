//! Exact weight-separation constants `θ*` for every ordered pair of
//! admissible sets, each with a rationally verified certificate.
//!
//! `cargo run --example theta_table -- [m] [n] [balanced|unbalanced]`

use diagflow::weights::{format_rational, theta_table, Reading};

fn main() -> diagflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let m: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let reading: Reading = args.next().map(|s| s.parse()).transpose()?.unwrap_or_default();

    let table = theta_table(m, n, reading)?;
    println!("{:>12} {:>12} {:>8}  {:<16} {:<16} weight", "I1", "I2", "theta*", "s", "t");
    for cert in &table {
        cert.verify()?;
        let s: Vec<String> = cert.witness_s.iter().map(format_rational).collect();
        let t: Vec<String> = cert.witness_t.iter().map(format_rational).collect();
        println!(
            "{:>12} {:>12} {:>8}  {:<16} {:<16} {} ({})",
            cert.i1.to_string(),
            cert.i2.to_string(),
            format_rational(&cert.theta_star),
            s.join(" "),
            t.join(" "),
            cert.achieving_weight,
            cert.achieving_side
        );
    }
    let min = table.iter().map(|c| &c.theta_star).min().expect("nonempty table");
    println!("\n{} pairs, all certificates verified, smallest θ* = {}", table.len(), format_rational(min));
    Ok(())
}
