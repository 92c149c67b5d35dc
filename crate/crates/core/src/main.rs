use std::process::ExitCode;

use clap::Parser;
use phi4lab::cli::{main_with, Cli};

fn main() -> ExitCode {
    main_with(Cli::parse())
}
