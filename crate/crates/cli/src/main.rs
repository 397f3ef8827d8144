//! `uncstates`: builds states, checks uncertainty relations and runs the
//! acceptance suite. Exit status 0 on success, 1 when a verification fails,
//! 2 on usage or input errors.

mod args;
mod commands;
mod config;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

fn emit(cli: &Cli, bytes: &[u8]) -> std::io::Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match commands::run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&cli, &outcome.bytes) {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(2);
    }
    match outcome.failure {
        None => ExitCode::SUCCESS,
        Some(msg) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}
