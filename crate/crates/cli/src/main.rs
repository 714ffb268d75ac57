//! `mirrorchain` command-line driver.
//!
//! Results go to `--output` (or stdout); diagnostics go to stderr as JSON
//! lines. Exit codes: 0 success, 1 I/O or internal error, 2 invalid input
//! or failed check, 3 non-convergence.

mod commands;
mod config;
mod diag;
mod grid;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use log::Level;
use mirrorchain::Error;
use serde_json::json;

use commands::Status;
use config::RunConfig;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NoConvergence { .. } => 3,
        Error::Io(_) | Error::Internal(_) => 1,
        _ => 2,
    }
}

fn load_config(cli: RunConfig) -> mirrorchain::Result<RunConfig> {
    match &cli.config {
        Some(_) if cli.command.is_some() => Err(Error::InvalidParameter(
            "--config replaces the command line; do not also give a command".into(),
        )),
        Some(path) => {
            let mut cfg: RunConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            cfg.verbose = cli.verbose;
            Ok(cfg)
        }
        None => Ok(cli),
    }
}

fn execute(cfg: &RunConfig) -> mirrorchain::Result<Status> {
    let Some(command) = &cfg.command else {
        return Err(Error::InvalidParameter("no command given (see --help)".into()));
    };
    let outcome = commands::run(cfg, command)?;
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, &outcome.body)?;
            println!("{}", outcome.summary);
        }
        None => std::io::stdout().lock().write_all(outcome.body.as_bytes())?,
    }
    let level = if outcome.status == Status::Ok { Level::Info } else { Level::Warn };
    diag::emit(level, "summary", json!({ "message": outcome.summary }));
    Ok(outcome.status)
}

fn main() -> ExitCode {
    let cli = RunConfig::parse();
    diag::init(cli.verbose);
    let result = load_config(cli).and_then(|cfg| {
        diag::emit(Level::Info, "config", json!({ "config": cfg }));
        execute(&cfg)
    });
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Invalid) => ExitCode::from(2),
        Ok(Status::NotConverged) => ExitCode::from(3),
        Err(e) => {
            diag::emit(Level::Error, "error", json!({ "message": e.to_string() }));
            ExitCode::from(exit_code(&e))
        }
    }
}
