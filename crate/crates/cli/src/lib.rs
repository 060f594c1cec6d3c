//! Batch interface to `tsi-core`: problem files, subcommands and result files.

pub mod commands;
pub mod error;
pub mod io;
pub mod problem;

pub use commands::{run, Cli, Command, Common, Outcome};
pub use error::{CliError, CliResult, ExitCode};
pub use problem::ProblemSpec;

/// Sizes the global thread pool from `TSI_THREADS`, if set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("TSI_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("TSI_THREADS must be a positive integer, got '{value}'")).at("TSI_THREADS"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::usage(e.to_string()).at("TSI_THREADS"))
}
