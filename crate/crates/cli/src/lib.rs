//! Library side of the `mlaurent` command line tool.

pub mod bench;
pub mod cache;
pub mod manifest;
pub mod selftest;
pub mod tables;
pub mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use mandel_laurent::ValidationLevel;

/// Environment variable naming the table cache directory. Unset disables
/// caching.
pub const CACHE_DIR_ENV: &str = "MLAURENT_CACHE_DIR";

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "mlaurent", version)]
#[command(about = "Exact Laurent coefficients of the Mandelbrot uniformizing maps and their 2-adic valuations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the B (φ) and C (ψ) tables for indices 0..=L.
    Generate(GenerateArgs),
    /// Check the valuation statements on generated tables.
    Verify(VerifyArgs),
    /// Run the combinatorial and reversion self-checks.
    Selftest(SelftestArgs),
    /// Time generation and reversion, and report coefficient sizes.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Validation {
    None,
    Cheap,
    Full,
}

impl From<Validation> for ValidationLevel {
    fn from(v: Validation) -> Self {
        match v {
            Validation::None => ValidationLevel::None,
            Validation::Cheap => ValidationLevel::Cheap,
            Validation::Full => ValidationLevel::Full,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    #[value(name = "1")]
    #[serde(rename = "1")]
    One,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
    #[value(name = "3")]
    #[serde(rename = "3")]
    Three,
    #[value(name = "4")]
    #[serde(rename = "4")]
    Four,
    Induction,
    All,
}

#[derive(Clone, Debug, PartialEq, Eq, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    /// Truncation index L.
    #[arg(long, short = 'L', value_parser = clap::value_parser!(u64).range(1..))]
    pub terms: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "cheap")]
    pub validation: Validation,
    /// Worker threads for series convolutions (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub theorem: Theorem,
    /// Largest index checked.
    #[arg(long, short = 'L', visible_alias = "max", value_parser = clap::value_parser!(u64).range(1..))]
    pub terms: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Directory for per-check reports and the run manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "cheap")]
    pub validation: Validation,
    /// Worker threads for series convolutions (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Args, Serialize, Deserialize)]
pub struct SelftestArgs {
    /// Seed for the randomized suites.
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Truncation for the reversion cross-check.
    #[arg(long, short = 'L', default_value_t = 64)]
    pub terms: u64,
    /// Directory for the run manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for series convolutions (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Args, Serialize, Deserialize)]
pub struct BenchArgs {
    /// Comma-separated truncation indices.
    #[arg(long, short = 'L', value_delimiter = ',', default_value = "64,128,256")]
    pub terms: Vec<u64>,
    /// CSV output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for series convolutions (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
}

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// A checked statement does not hold.
    Violation,
    /// The pipeline contradicts itself (e.g. reversion paths disagree).
    Inconsistent,
    /// I/O or input problems.
    Failure,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Violation => 1,
            Status::Inconsistent => 2,
            Status::Failure => 3,
        }
    }
}

impl Cli {
    /// Runs the parsed command and returns the process exit code.
    pub fn run(self) -> u8 {
        let command = self.command;
        let jobs = match &command {
            Command::Generate(a) => a.jobs,
            Command::Verify(a) => a.jobs,
            Command::Selftest(a) => a.jobs,
            Command::Bench(a) => a.jobs,
        };
        if let Some(jobs) = jobs {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs as usize)
                .build_global()
            {
                eprintln!("error: {e}");
                return Status::Failure.code();
            }
        }
        let result = match command {
            Command::Generate(args) => tables::run(&args),
            Command::Verify(args) => verify::run(&args),
            Command::Selftest(args) => selftest::run(&args),
            Command::Bench(args) => bench::run(&args),
        };
        match result {
            Ok(status) => status.code(),
            Err(e) => {
                eprintln!("error: {e:#}");
                Status::Failure.code()
            }
        }
    }
}
