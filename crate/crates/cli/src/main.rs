//! `relay-sinr`: batch evaluation of relay outage scenarios.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid scenario or unknown
//! preset, 3 numerical failure at one or more points (the CSV is still
//! written, with those rows flagged).

mod error;
mod presets;
mod run;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::CliError;

#[derive(Parser)]
#[command(name = "relay-sinr", version, about = "Outage, CDF and PDF of the end-to-end SINR of interfered AF relay links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario file, or rerun the scenario recorded in a manifest.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a built-in figure preset: fig-b, fig-c, fig-d, fig-h, fig-i, fig-e, fig-f or fig-g.
    Figure {
        name: String,
        #[arg(long)]
        out: PathBuf,
        /// Draws per simulated set; 0 skips the simulation.
        #[arg(long)]
        mc_samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a scenario file without evaluating it.
    Validate { scenario: PathBuf },
}

const THREADS_VAR: &str = "RELAY_SINR_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Schema(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Io(format!("starting {n} worker threads: {e}")))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))
}

fn evaluate(s: scenario::Scenario, out: &Path, command: &str) -> Result<ExitCode, CliError> {
    let plan = scenario::resolve(s)?;
    let report = run::execute(&plan, out, command)?;
    println!("wrote {} rows to {}", report.rows, out.join("curves.csv").display());
    if report.failures > 0 {
        eprintln!(
            "{} points failed to converge; see the failures list in {}",
            report.failures,
            out.join("manifest.json").display()
        );
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Run { scenario, out } => {
            let s = scenario::parse(&read(&scenario)?).map_err(|e| e.within(&scenario.display().to_string()))?;
            evaluate(s, &out, "run")
        }
        Command::Figure {
            name,
            out,
            mc_samples,
            seed,
        } => {
            let mut value = presets::preset(&name)?;
            presets::override_mc(&mut value, mc_samples, seed);
            let s = serde_json::from_value(value).map_err(|e| CliError::Schema(format!("preset {name}: {e}")))?;
            evaluate(s, &out, &format!("figure {name}"))
        }
        Command::Validate { scenario } => {
            let s = scenario::parse(&read(&scenario)?).map_err(|e| e.within(&scenario.display().to_string()))?;
            let plan = scenario::resolve(s)?;
            let points: usize = plan.curves.iter().map(|c| c.points.len()).sum();
            println!(
                "ok: {} curve(s), {points} points along {}",
                plan.curves.len(),
                plan.axis.unit()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
