use std::process::ExitCode;

use clap::Parser;
use qabc::cli::{run, Cli};

fn main() -> ExitCode {
    run(Cli::parse())
}
