use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use heyde_cli::{describe, load_scenario, run_scenario, CliError, Format, RunOptions, BUNDLED};

#[derive(Parser)]
#[command(
    name = "heyde",
    version,
    about = "Run Heyde-type characterization checks from scenario files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or bundled scenario.
    Run {
        scenario: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Residual tolerance for eq2, eq5 and P/Q checks.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record per-check wall time (makes reports non-reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// List the bundled scenarios.
    ListScenarios,
    /// Print a scenario's group, distributions and checks.
    Describe { scenario: String },
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run {
            scenario,
            format,
            seed,
            workers,
            tolerance,
            out,
            timings,
        } => {
            let s = load_scenario(&scenario)?;
            let opts = RunOptions {
                seed,
                workers,
                tolerance,
                timings,
            };
            let report = run_scenario(&s, &opts)?;
            let text = report.emit(format);
            match out {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            Ok(if report.mismatches() > 0 {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::ListScenarios => {
            for (name, text) in BUNDLED {
                let s = heyde_cli::Scenario::parse(name, text)?;
                let first = s.description.trim().lines().next().unwrap_or("");
                println!("{name:<24} {first}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Describe { scenario } => {
            print!("{}", describe(&load_scenario(&scenario)?));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("heyde: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
