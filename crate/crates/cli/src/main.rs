use std::process::ExitCode;

use clap::Parser;
use dpsattack_cli::{execute, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match execute(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
