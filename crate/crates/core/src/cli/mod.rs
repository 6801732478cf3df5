//! Command line front end: one TOML config per run, a JSON manifest and
//! CSV tables per output directory.
//!
//! Exit codes: 0 success, 2 validation failure, 3 numerical failure,
//! 4 certification failure.

mod commands;
pub mod config;
pub mod manifest;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

pub use commands::{cmd_certify, cmd_report, cmd_scatter, cmd_simulate, cmd_sweep, Outcome, SweepRow};
pub use config::RunConfig;
pub use manifest::{latest_manifest, Manifest};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "radscatter", version, about = "Radial wave scattering runs, decay fits and bound certification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the nonlinear problem and write field snapshots.
    Simulate(RunArgs),
    /// Fixed point, asymptotic free waves and decay-rate fits.
    Scatter(RunArgs),
    /// Certify the integral inequalities listed under [verify].
    Certify(RunArgs),
    /// Run the [sweep] parameter grid.
    Sweep(RunArgs),
    /// Summarise the latest manifest in a directory.
    Report {
        dir: PathBuf,
    },
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// Run config (TOML).
    #[arg(short, long)]
    pub config: PathBuf,
    /// Overrides `output` from the config.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn load(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(o) = &args.output {
        cfg.output = o.to_string_lossy().into_owned();
    }
    Ok(cfg)
}

/// Run one command; the report text or manifest path goes to stdout.
pub fn execute(cmd: &Command) -> Result<i32> {
    let run = |args: &RunArgs, f: fn(&RunConfig) -> Result<Outcome>| -> Result<i32> {
        let out = f(&load(args)?)?;
        println!("{}", out.manifest_path.display());
        Ok(out.exit_code)
    };
    match cmd {
        Command::Simulate(a) => run(a, cmd_simulate),
        Command::Scatter(a) => run(a, cmd_scatter),
        Command::Certify(a) => run(a, cmd_certify),
        Command::Sweep(a) => run(a, cmd_sweep),
        Command::Report { dir } => {
            print!("{}", cmd_report(dir)?);
            Ok(0)
        }
    }
}

/// JSON error document printed to stderr on failure.
pub fn error_json(e: &Error) -> serde_json::Value {
    let errors: Vec<_> = e.details().into_iter().map(|(what, detail)| json!({ "what": what, "detail": detail })).collect();
    json!({ "kind": e.kind(), "exit_code": e.exit_code(), "message": e.to_string(), "errors": errors })
}

/// Parse `args`, run, and map failures to exit codes.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            e.exit_code()
        }
    }
}
