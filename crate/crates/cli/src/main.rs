use std::io::Write;
use std::process;

use clap::error::ErrorKind;
use clap::Parser;
use tsi_cli::{configure_threads, run, Cli, CliError};

fn fail(err: CliError) -> ! {
    eprintln!("{}", err.to_json());
    process::exit(err.exit as i32);
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => fail(CliError::usage(e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: "))),
    };
    let outcome = configure_threads().and_then(|()| run(&cli)).unwrap_or_else(|e| fail(e));
    if std::io::stdout().lock().write_all(outcome.stdout.as_bytes()).is_err() {
        process::exit(3);
    }
    process::exit(outcome.exit as i32);
}
