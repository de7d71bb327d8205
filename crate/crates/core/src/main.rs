use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use diagflow::experiment::{
    exit_code, load_config, run_experiment, workers_from_env, Format, Kind, Outcome, Report, RunOutput,
};
use diagflow::weights::Reading;
use diagflow::Error;

#[derive(Parser)]
#[command(name = "diagflow", version, about = "Decorrelation experiments for diagonal flows on lattice tori")]
#[command(after_help = "Worker threads: set DIAGFLOW_WORKERS (default: available parallelism). Results do not depend on it.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Balanced,
    Unbalanced,
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the exact θ* table for every ordered pair of admissible sets as
    /// CSV, or run a theta config and write its artifacts.
    Theta {
        #[arg(long, required_unless_present = "config", conflicts_with = "config")]
        m: Option<usize>,
        #[arg(long, required_unless_present = "config", conflicts_with = "config")]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "balanced")]
        mode: Mode,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Decorrelation gap against Δ with an exponential decay fit.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Joint, μ_I or Haar integral estimates.
    Integral {
        #[arg(long)]
        config: PathBuf,
    },
    /// Case-analysis traces for flow tuples.
    Case {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: TraceFormat,
    },
    /// Averaged decorrelation along a translation on affine lattices.
    Affine {
        #[arg(long)]
        config: PathBuf,
    },
    /// Exact averaged decorrelation of trigonometric polynomials on the circle.
    Circle {
        #[arg(long)]
        config: PathBuf,
    },
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code(err) as u8)
}

fn theta(m: usize, n: usize, mode: Mode) -> Result<(), Error> {
    let reading = match mode {
        Mode::Balanced => Reading::Balanced,
        Mode::Unbalanced => Reading::Unbalanced,
    };
    let certs = diagflow::weights::theta_table(m, n, reading)?;
    for c in &certs {
        c.verify()?;
    }
    let rows = certs.iter().map(diagflow::experiment::report::ThetaRow::from_certificate).collect();
    let report = Report { id: "theta".into(), seed: None, notes: vec![], outcome: Outcome::Theta(rows) };
    print!("{}", diagflow::experiment::render(&report, Format::Csv)?);
    Ok(())
}

fn run(config: &Path, expected: Kind) -> Result<RunOutput, Error> {
    let loaded = load_config(config)?;
    if loaded.config.kind != expected {
        return Err(Error::Config(format!(
            "config kind is '{}' but the '{expected}' subcommand was used",
            loaded.config.kind
        )));
    }
    run_experiment(config, workers_from_env()?)
}

fn summarize(out: &RunOutput) {
    let r = &out.report;
    match &r.outcome {
        Outcome::Sweep(s) => {
            for row in &s.rows {
                println!("Δ = {:<6} gap = {:+.6e} ± {:.2e}", row.delta, row.gap, row.stderr);
            }
            match &s.fit {
                Some(f) => match f.fit_stderr {
                    Some(se) => println!("fitted η = {:.4} ± {:.4} over {} rows", f.fitted_eta, se, f.rows_used),
                    None => println!("fitted η = {:.4} over {} rows", f.fitted_eta, f.rows_used),
                },
                None => println!("no decay fit"),
            }
        }
        Outcome::Integral(i) => {
            for row in &i.rows {
                let h = row.horizon.map(|h| format!(" (T = {h})")).unwrap_or_default();
                println!("{}{h}: {:.6e} ± {:.2e}", row.quantity, row.mean, row.stderr);
            }
        }
        Outcome::Affine(rows) => {
            for row in rows {
                println!("L|w| = {:<8} gap = {:+.6e} ± {:.2e}", row.scale, row.gap.mean, row.gap.stderr);
            }
        }
        Outcome::Circle(rows) => {
            for row in rows {
                println!("L = {:<8} gap = {:+.6e}{:+.6e}i", row.length, row.result.gap.re, row.result.gap.im);
            }
        }
        Outcome::Theta(rows) => {
            let min = rows.iter().map(|r| r.theta_star.as_str()).collect::<Vec<_>>();
            println!("{} ordered pairs, θ* values: {}", rows.len(), min.join(" "));
        }
        Outcome::Case(_) => {}
    }
    for note in &r.notes {
        println!("note: {note}");
    }
    for f in &out.files {
        println!("wrote {}", f.display());
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Theta { config: Some(config), .. } => run(&config, Kind::Theta).map(Some),
        Command::Theta { m, n, mode, .. } => {
            theta(m.expect("required by clap"), n.expect("required by clap"), mode).map(|_| None)
        }
        Command::Sweep { config } => run(&config, Kind::Sweep).map(Some),
        Command::Integral { config } => run(&config, Kind::Integral).map(Some),
        Command::Affine { config } => run(&config, Kind::Affine).map(Some),
        Command::Circle { config } => run(&config, Kind::Circle).map(Some),
        Command::Case { config, format } => run(&config, Kind::Case).and_then(|out| {
            let f = match format {
                TraceFormat::Text => Format::Text,
                TraceFormat::Json => Format::Json,
            };
            print!("{}", diagflow::experiment::render(&out.report, f)?);
            Ok(None)
        }),
    };
    match result {
        Ok(Some(out)) => {
            summarize(&out);
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
