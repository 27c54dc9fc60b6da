//! Batch driver: configuration files, chart presets, and the `flow`,
//! `check-structure`, `fit-einstein` and `report` commands.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod fit;
pub mod presets;
pub mod report;
pub mod run;
pub mod structure;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use log::LevelFilter;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};

pub const EXIT_OK: i32 = 0;
/// Bad configuration or unreadable input.
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
/// Positivity lost, step-size floor, or divergence.
pub const EXIT_UNSTABLE: i32 = 3;
pub const EXIT_IDENTITY: i32 = 4;

/// Environment variable selecting verbosity: `quiet`, `normal` or `debug`.
pub const LOG_VAR: &str = "VAISMAN_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "vaisman",
    version,
    about = "Transverse Kähler–Ricci flow on Vaisman charts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the flow described by a config file
    Flow { config: PathBuf },
    /// Verify the structure identities at two resolutions
    CheckStructure { config: PathBuf },
    /// Fit Ric ≈ λg + αθᶜ⊗θᶜ + βθ⊗θ for a snapshot, {metric, ricci} pair or config
    FitEinstein {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize a history CSV
    Report { history: PathBuf },
}

pub fn init_logging() {
    let level = match std::env::var(LOG_VAR).as_deref() {
        Ok("quiet") => LevelFilter::Off,
        Ok("debug") => LevelFilter::Debug,
        _ => LevelFilter::Info,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .format_target(false)
        .try_init();
}

fn exit_code(e: &CliError) -> i32 {
    use vaisman_core::Error;
    match e {
        CliError::Core(Error::PositivityLost { .. } | Error::StepFloor { .. }) => EXIT_UNSTABLE,
        CliError::Core(Error::IdentityViolation { .. }) => EXIT_IDENTITY,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Flow { config } => run::flow(config),
        Command::CheckStructure { config } => structure::check_structure(config),
        Command::FitEinstein { path, out } => fit::fit_einstein(path, out.as_deref()),
        Command::Report { history } => report::report(history),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    })
}
