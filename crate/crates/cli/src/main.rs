use std::process::ExitCode;

use clap::Parser;
use qclone_cli::args::Cli;
use qclone_cli::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match qclone_cli::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("qclone: {e}");
            match e {
                CliError::Usage(_) => ExitCode::from(2),
                CliError::Failure(_) => ExitCode::from(1),
            }
        }
    }
}
