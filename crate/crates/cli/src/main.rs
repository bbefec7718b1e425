//! fracvar: identity checks, envelopes, minimization and relaxation runs
//! driven by a TOML config.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on
//! configuration errors.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use config::{load_file, Command};
use error::{CliError, CliResult};
use output::Output;

#[derive(Debug, Parser)]
#[command(name = "fracvar", version, about = "Fractional calculus of variations on sampled grids")]
struct Cli {
    /// Command to run; falls back to `command` in the config.
    #[arg(value_enum)]
    command: Option<Command>,
    /// TOML run configuration (built-in defaults when omitted).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Dotted-key override, e.g. `params.alpha=0.25`; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn run(cli: Cli) -> CliResult<bool> {
    let mut cfg = load_file(cli.config.as_deref(), &cli.overrides)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let command = cli
        .command
        .or(cfg.command)
        .ok_or_else(|| CliError::Config("no command given on the command line or in the config".into()))?;
    let dir = cli.output.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("fracvar-out"));
    let out = Output::create(&dir)?;
    let outcome = commands::run(command, &cfg, &out)?;
    out.json(
        "summary.json",
        &json!({ "command": command, "seed": cfg.seed, "passed": outcome.passed, "results": outcome.summary }),
    )?;
    println!("{}: {}", serde_json::to_string(&command)?.trim_matches('"'), if outcome.passed { "passed" } else { "FAILED" });
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
