//! `htg`: generate, inspect, filter, contour, export and benchmark hypertree
//! grids. Summaries go to stdout as `key=value` lines (aligned columns with
//! `--pretty`); errors go to stderr with a nonzero exit code.

mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
