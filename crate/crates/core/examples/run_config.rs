//! Runs a TOML experiment config the same way the `diagflow` binary does and
//! prints where the artifacts went.
//!
//! `cargo run --release --example run_config -- configs/theta_2x1.toml`

use std::path::PathBuf;

use diagflow::experiment::{run_experiment, workers_from_env};

fn main() -> diagflow::Result<()> {
    let path: PathBuf = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "configs/theta_2x1.toml".into());
    let out = run_experiment(&path, workers_from_env()?)?;
    for note in &out.report.notes {
        println!("note: {note}");
    }
    for f in &out.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
