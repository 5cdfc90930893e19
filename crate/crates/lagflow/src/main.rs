use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use lagflow::{output, parse_config, presets, run, suites, Outcome};

/// Lagrangian mean curvature and curve diffusion flow simulator.
#[derive(Parser)]
#[command(name = "lagflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the flow described by a `key = value` config file.
    Run { config: PathBuf },
    /// Run a property suite and print its report as JSON.
    Check {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(suites::SUITES))]
        suite: String,
    },
    /// List initial-data presets and their parameters.
    Presets,
}

fn output_override() -> Option<PathBuf> {
    std::env::var_os("LAGFLOW_OUTPUT")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg = parse_config(&text).with_context(|| format!("in {}", config.display()))?;
            let outcome = run(&cfg, output_override().as_deref())?;
            match &outcome {
                Outcome::BlowUp { time } => eprintln!("blow-up detected at t = {time}"),
                Outcome::SlopeViolation { time, message } => {
                    eprintln!("slope condition violated at t = {time}: {message}")
                }
                Outcome::CheckFailed { failed } => eprintln!("failed: {}", failed.join(", ")),
                Outcome::Completed => {}
            }
            Ok(outcome)
        }
        Command::Check { suite } => {
            let report = suites::run_suite(&suite)?;
            for c in &report.criteria {
                eprintln!("{}", c.line());
            }
            if let Some(dir) = output_override() {
                std::fs::create_dir_all(&dir)?;
                output::write_json(&dir.join("check.json"), &report)?;
            }
            println!("{}", output::to_json(&report)?);
            Ok(report.outcome())
        }
        Command::Presets => {
            print!("{}", presets::listing());
            Ok(Outcome::Completed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors share the config-error status; 2 is reserved for blow-up
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
