use std::process::ExitCode;

use clap::Parser;
use localize_cli::args::Cli;
use localize_cli::{configure_threads, execute, render};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| execute(&cli));
    match outcome {
        Ok(report) => {
            print!("{}", render(&cli, &report));
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
