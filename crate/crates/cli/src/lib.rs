//! Command-line frontend for the `asymptolim` solvers.
//!
//! Exit codes: 0 on success, 2 on invalid input or unwritable output, 3 on
//! numerical failure (including a `--tol` that was not met).

pub mod args;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use args::{Cli, Cmd};
pub use config::{Command, OutputFormat, Params, RunConfig};
pub use error::CliError;
pub use run::{run, Outcome, Report, Status};

/// Parses, runs and writes; returns the process exit code.
pub fn main_with(cmd: Cmd) -> i32 {
    let outcome = cmd.into_config().and_then(|config| {
        let report = run(&config)?;
        output::emit(&report)?;
        Ok(report.exit_code())
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
