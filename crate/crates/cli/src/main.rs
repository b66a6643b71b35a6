use std::process::ExitCode;

use clap::Parser;

use trendforge::commands::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("trendforge: {e}");
            ExitCode::from(e.code)
        }
    }
}
