//! Command-line runs of the `phasetime-core` analyses. Each run writes CSV
//! files whose leading `#` lines echo the resolved parameters, plus a
//! `manifest.json` that `phasetime replay` re-executes.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;

pub use args::{Cli, Command};
pub use commands::{run, Report};
pub use error::CliError;
