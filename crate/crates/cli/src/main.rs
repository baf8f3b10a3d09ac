//! `l1logit`: fit, calibrate, simulate, evaluate and diagnose from the
//! command line.
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.

mod args;
mod commands;
mod error;
mod io;
mod report;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // --help and --version also arrive here
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("l1logit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
