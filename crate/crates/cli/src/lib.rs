//! Command-line front end: CSV ingestion, seasonal blocking, chain
//! configuration and the `simulate`, `fit`, `diagnose` and `study`
//! commands.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod manifest;
pub mod output;
pub mod seasons;

pub use cli::main_with_args;
pub use error::{CliError, CliResult};
