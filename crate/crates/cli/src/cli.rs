use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{diagnose, fit, simulate, study};
use crate::config::FileConfig;
use crate::error::{exit, CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "hetgev",
    version,
    about = "Dirichlet-process GEV mixtures for block maxima"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic block-maxima dataset and its truth record.
    Simulate(simulate::SimulateArgs),
    /// Run the Gibbs sampler on a dataset and write the draw log.
    Fit(fit::FitArgs),
    /// Posterior curves, return levels and residuals of a fitted run.
    Diagnose(diagnose::DiagnoseArgs),
    /// Replicated simulate-and-fit study of a scenario.
    Study(study::StudyArgs),
}

/// Chain settings shared by `fit` and `study`. Precedence, lowest first:
/// library defaults, `--config` file, `--set` pairs, dedicated flags.
#[derive(Debug, Clone, Default, Args)]
pub struct ChainFlags {
    /// Flat `key = value` settings file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override one settings key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Total sweeps; burn-in defaults to half.
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    /// Number of stick-breaking components.
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Keep proposal scales fixed during burn-in.
    #[arg(long)]
    pub no_adapt: bool,
}

impl ChainFlags {
    pub fn file_config(
        &self,
        seed: Option<u64>,
        censor_delta: Option<f64>,
    ) -> CliResult<FileConfig> {
        let base = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let flags = FileConfig {
            n_iter: self.iterations,
            burn_in: self.burn_in,
            thin: self.thin,
            truncation: self.truncation,
            adapt: self.no_adapt.then_some(false),
            seed,
            censor_delta,
            ..FileConfig::default()
        };
        Ok(base.with_overrides(&self.set)?.merge(flags))
    }
}

pub fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate(a) => simulate::run(&a),
        Command::Fit(a) => fit::run(&a),
        Command::Diagnose(a) => diagnose::run(&a),
        Command::Study(a) => study::run(&a),
    }
}

fn report(err: &CliError) -> i32 {
    eprintln!("{}", err.machine_line());
    eprintln!("error: {err}");
    err.exit_code()
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return exit::OK;
            }
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            let err = CliError::Usage(first.trim_start_matches("error: ").to_string());
            eprintln!("{}", err.machine_line());
            eprint!("{rendered}");
            return exit::USAGE;
        }
    };
    match execute(cli) {
        Ok(()) => exit::OK,
        Err(e) => report(&e),
    }
}
