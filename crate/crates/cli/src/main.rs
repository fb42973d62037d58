//! `fbb84`: reproducible reports from the finite-bb84 library.
//!
//! Exit codes: 0 when every check passes, 1 when a bound or invariant check
//! fails, 2 on usage, parse or input errors.

mod commands;
mod config;
mod error;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Context;
use error::CliError;
use report::Format;

#[derive(Debug, Parser)]
#[command(name = "fbb84", version, about = "Finite-length BB84 security analysis: checks, bounds and protocol simulation")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Global {
    /// Seed for every random draw; overrides any seed in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// TOML config for the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Replace the size guard of the exhaustive computation behind the subcommand.
    #[arg(long, global = true)]
    pub guard_override: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exhaustive universality profile of the Toeplitz family.
    VerifyToeplitz(commands::toeplitz::Args),
    /// Every Eve-figure bound against the exact oracle on random channels.
    OracleCheck(commands::oracle::Args),
    /// Run protocol sessions from a session and strategy config.
    Simulate(commands::simulate::Args),
    /// Phase-error bound and derived figures for given class counts.
    Bound(commands::bound::Args),
    /// Decoy-state estimates of the single-photon parameters.
    EstimateDecoy(commands::decoy::Args),
    /// The six asymptotic key rates and their ordering.
    Rates(commands::rates::Args),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyToeplitz(_) => "verify-toeplitz",
            Command::OracleCheck(_) => "oracle-check",
            Command::Simulate(_) => "simulate",
            Command::Bound(_) => "bound",
            Command::EstimateDecoy(_) => "estimate-decoy",
            Command::Rates(_) => "rates",
        }
    }
}

/// Arguments after the program name, without `--out` and its value.
fn recorded_arguments(raw: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in raw.iter().skip(1) {
        if skip {
            skip = false;
        } else if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            out.push(a.clone());
        }
    }
    out
}

fn run(cli: &Cli, raw: &[String]) -> Result<bool, CliError> {
    let ctx = Context { global: &cli.global };
    let outcome = match &cli.command {
        Command::VerifyToeplitz(a) => commands::toeplitz::run(a, &ctx)?,
        Command::OracleCheck(a) => commands::oracle::run(a, &ctx)?,
        Command::Simulate(a) => commands::simulate::run(a, &ctx)?,
        Command::Bound(a) => commands::bound::run(a, &ctx)?,
        Command::EstimateDecoy(a) => commands::decoy::run(a, &ctx)?,
        Command::Rates(a) => commands::rates::run(a, &ctx)?,
    };
    let config = cli.global.config.iter().map(|p| p.display().to_string()).collect();
    let manifest = report::manifest(cli.command.name(), config, recorded_arguments(raw), &outcome);
    let rendered = report::render(&manifest, &outcome, cli.global.format);
    match &cli.global.out {
        Some(path) => std::fs::write(path, rendered).map_err(|e| CliError::io(path, e))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not a failed check.
            let _ = stdout.write_all(rendered.as_bytes());
        }
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(&cli, &raw) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("fbb84: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_is_not_recorded() {
        let raw: Vec<String> = ["fbb84", "rates", "--out", "x.txt", "--format", "json", "--out=y"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(recorded_arguments(&raw), ["rates", "--format", "json"]);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
