//! `qgeo`: experiment runner for the geometric quantum mechanics library.

mod commands;
mod config;
mod output;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use commands::Status;
use config::{Command, Overrides, ScenarioConfig, HBAR_ENV};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "qgeo", version, about = "Geometric quantum mechanics experiments")]
struct Cli {
    /// Experiment to run.
    command: Command,
    /// JSON scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Override a config key by dot path, e.g. `params.steps=2048`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Output directory; overrides `output_path`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    // clap exits with status 2 on malformed arguments.
    let cli = Cli::parse();
    let overrides = Overrides {
        sets: &cli.sets,
        out: cli.out.as_deref(),
        env_hbar: std::env::var(HBAR_ENV).ok(),
    };
    let result = ScenarioConfig::load(cli.command, &cli.config, &overrides).and_then(|cfg| commands::run(&cfg));
    match result {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
