mod cli;
mod commands;
mod report;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::cli::{Cli, Command};
use crate::report::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(CliError::USAGE),
            };
        }
    };
    let result = match cli.command {
        Command::Sample(args) => commands::sample::run(&args),
        Command::Mle(args) => commands::mle::run(&args),
        Command::VerifyLemma(args) => commands::lemma::run(&args),
        Command::Mldegree(args) => commands::mldegree::run(&args),
        Command::Multiplicity(args) => commands::multiplicity::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
