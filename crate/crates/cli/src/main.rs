use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    ExitCode::from(levyflow_cli::run(levyflow_cli::Cli::parse()))
}
