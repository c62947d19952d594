//! Command-line front end of `jcxy`: argument validation, the five
//! subcommands and their CSV/JSON writers.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod reference;

pub use config::{Cli, Command};
pub use error::CliError;

/// Runs one parsed invocation, writing reports to `stdout`/`stderr`.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum(args) => commands::spectrum(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Table(args) => commands::table(&args),
        Command::Verify(args) => commands::verify(&args),
        Command::Matrix(args) => commands::matrix(&args),
    }
}
