use std::process::ExitCode;

use clap::Parser;
use typdiv::cli::{run, Cli};
use typdiv::Error;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("typdiv: {e}");
            if matches!(e, Error::Size { .. } | Error::Argument(_)) {
                eprintln!("typdiv: hint: see `typdiv <command> --help` for valid sizes and flags");
            }
            ExitCode::FAILURE
        }
    }
}
