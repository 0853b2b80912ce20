//! `sparsedisc`: generate instances, solve, verify, benchmark and compare
//! against the exhaustive oracle.
//!
//! Exit codes: 0 on success, 1 when a solve or check fails, 2 on usage
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod bench;
mod generate;
mod io;
mod oracle;
mod solve;
mod verify;

#[derive(Parser)]
#[command(
    name = "sparsedisc",
    version,
    about = "Low-discrepancy colorings of sparse coverage functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance.
    #[command(subcommand)]
    Generate(generate::Kind),
    /// Color an instance and write the coloring and a report.
    Solve(SolveArgs),
    /// Recompute discrepancy, class values and rainbow status.
    Verify(VerifyArgs),
    /// Sweep a parameter grid and write one CSV row per run.
    Bench(bench::BenchArgs),
    /// Exact minimum discrepancy by enumeration.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Algo {
    Small,
    Big,
    All,
    Auto,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, ValueEnum)]
pub enum Precision {
    #[default]
    F64,
    F32,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value = "auto")]
    algo: Algo,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "in")]
    input: PathBuf,
    /// Coloring file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report file; printed to stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Maximum set size for the small-sets solver.
    #[arg(long)]
    s: Option<usize>,
    /// Retry limit for the small- and all-sets solvers.
    #[arg(long)]
    retries: Option<usize>,
    #[arg(long, value_enum, default_value = "f64")]
    precision: Precision,
    /// Print a table instead of JSON on stdout.
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    coloring: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    /// Coloring to compare against the minimum.
    #[arg(long)]
    compare: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    pretty: bool,
}

/// A failure reported with exit code 1.
#[derive(Debug)]
pub struct Failure(pub String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(kind) => generate::run(kind),
        Command::Solve(args) => solve::run(args),
        Command::Verify(args) => verify::run(args),
        Command::Bench(args) => bench::run(args),
        Command::Oracle(args) => oracle::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
