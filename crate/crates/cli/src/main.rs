//! `mlaurent`: coefficient tables and valuation checks from the command line.

use std::process::ExitCode;

use clap::Parser;
use mandel_laurent_cli::Cli;

fn main() -> ExitCode {
    ExitCode::from(Cli::parse().run())
}
