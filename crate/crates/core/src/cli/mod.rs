//! The `arnagg` command-line front end.
//!
//! Exit codes: [`EXIT_SUCCESS`], [`EXIT_FAILURE`] for internal failures,
//! [`EXIT_NOT_CONVERGED`] when `aggregate` hits the dimension cap (the
//! artifacts are still written), [`EXIT_BAD_INPUT`] for invalid arguments or
//! input files and [`EXIT_OVERFLOW`] when a state space exceeds its limit.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
pub use config::{P0Source, RunArgs, RunConfig};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_BAD_INPUT: i32 = 3;
pub const EXIT_OVERFLOW: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "arnagg",
    version,
    about = "Arnoldi aggregation of discrete-time Markov chains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand until the stopping criterion holds; write the aggregation and the trace
    Aggregate(RunArgs),
    /// One expansion to the largest of --dims with errors and diagnostics per dimension
    Sweep(SweepArgs),
    /// Write naive and/or aggregated transient distributions and their distance
    Transient(TransientArgs),
    /// Median wall-clock timings of expansion, adaptive runs and evaluation
    Bench(RunArgs),
    /// Export or describe catalog models
    #[command(subcommand)]
    Model(ModelCommand),
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Add closed-form error and error bound columns for every horizon
    #[arg(long)]
    pub closed_form: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TransientArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Aggregation directory written by `aggregate`
    #[arg(long, value_name = "DIR")]
    pub aggregation: Option<PathBuf>,
    /// Also compute the transient distributions of the full chain
    #[arg(long)]
    pub naive: bool,
}

#[derive(Debug, Subcommand)]
pub enum ModelCommand {
    /// Write model.mtx and model.json into --out
    Export(RunArgs),
    /// Print the model descriptor as JSON
    Describe(RunArgs),
    /// List the catalog names
    List,
}

/// Exit code for a failed command.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(Error::StateSpaceOverflow { .. }) => EXIT_OVERFLOW,
        Some(Error::EigenSolver(_)) => EXIT_FAILURE,
        Some(Error::Io(e)) if e.kind() != std::io::ErrorKind::NotFound => EXIT_FAILURE,
        Some(_) => EXIT_BAD_INPUT,
        None => EXIT_FAILURE,
    }
}

/// Parses `args` (program name first), runs the command and returns its exit code.
///
/// Reports go to `out`; diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_BAD_INPUT
            } else {
                EXIT_SUCCESS
            };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match commands::dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit_code(&e)
        }
    }
}
