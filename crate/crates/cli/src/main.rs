//! `qinfo` command-line front end. Every subcommand prints one JSON object
//! (or a CSV header and row) with floats at 12 significant digits; per-round
//! data goes to `--transcript` as JSON lines. Exit code 2 signals bad input.

mod args;
mod commands;
mod error;
mod output;
mod parse;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::commands::SeedSource;
use crate::error::CliError;

fn run(cli: &Cli) -> Result<(), CliError> {
    let seed = SeedSource::new(cli.seed);
    let report = commands::run(&cli.command, &seed)?;
    output::emit(
        report,
        cli.format,
        cli.out.as_deref(),
        cli.transcript.as_deref(),
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
