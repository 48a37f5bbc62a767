//! Command-line front end: parse a scene file describing one mirror
//! surface and a list of queries, run them through the oriented-line
//! machinery, and emit one CSV table on standard output. Diagnostics go
//! to standard error. `selftest` runs the built-in fixture suite.

mod run;
mod scene;
mod selftest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "catoptrics",
    about = "Mirror-reflection characteristic functions on the space of oriented lines",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the queries in a scene file and print CSV rows.
    Run {
        /// Scene file path.
        scene: PathBuf,
        /// Cross-check every characteristic row against the vector
        /// oracle and append `oracle` and `delta` columns.
        #[arg(long)]
        verify: bool,
        /// Seed-grid resolution per axis for the root searches.
        #[arg(long)]
        grid: Option<usize>,
        /// Root acceptance tolerance for the searches.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run the built-in fixture suite.
    Selftest,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { scene, verify, grid, tol } => {
            if let Some(0) = grid {
                eprintln!("error: --grid must be positive");
                return ExitCode::from(2);
            }
            if let Some(t) = tol {
                if !(t > 0.0) {
                    eprintln!("error: --tol must be positive");
                    return ExitCode::from(2);
                }
            }
            let text = match std::fs::read_to_string(&scene) {
                Ok(text) => text,
                Err(err) => {
                    eprintln!("error: cannot read {}: {err}", scene.display());
                    return ExitCode::from(2);
                }
            };
            let parsed = match scene::parse_scene(&text) {
                Ok(parsed) => parsed,
                Err(err) => {
                    eprintln!("error: {}: {err}", scene.display());
                    return ExitCode::from(2);
                }
            };
            let overrides = run::Overrides { verify, grid, tol };
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            let report = run::run_scene(&parsed, &overrides, &mut out);
            let _ = out.flush();
            if report.solver_failures > 0 {
                eprintln!("{} query(ies) ended in a solver failure", report.solver_failures);
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::Selftest => {
            if selftest::run_all() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
