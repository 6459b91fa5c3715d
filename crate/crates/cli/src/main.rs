//! `numprobe`: measure how faithfully text-embedding models encode scalar
//! numbers.
//!
//! The pipeline is `generate` → `embed` → `evaluate` → `report`/`plot`,
//! or `run-all` for everything at once. Every stage is deterministic for
//! a given seed; remote embeddings can be cached on disk and are verified
//! against dataset fingerprints downstream.

mod commands;
mod config;
mod errors;
mod manifest;
mod paths;

use clap::{Parser, Subcommand};
use config::{CliOverrides, FileConfig, Settings};
use errors::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "numprobe",
    version,
    about = "Measure how faithfully text-embedding models encode scalar numbers",
    propagate_version = true
)]
struct Cli {
    /// TOML configuration file (flags override its values)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed for datasets and fold splits
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Models to run, comma-separated (e.g. voyage-3-large,synthetic:linear/d=256)
    #[arg(long, global = true, value_delimiter = ',', value_name = "MODEL")]
    models: Vec<String>,

    /// Number families, comma-separated (positive-decimals, mixed-sign-decimals, mixed-sign-integers)
    #[arg(long, global = true, value_delimiter = ',', value_name = "FAMILY")]
    families: Vec<String>,

    /// Highest precision level to sweep (1..=20)
    #[arg(long, global = true, value_name = "LEVEL")]
    max_precision: Option<u32>,

    /// Samples per precision level (grids smaller than this are used whole)
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Cross-validation folds
    #[arg(long, global = true)]
    folds: Option<usize>,

    /// Embedding cache directory (created if missing)
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<PathBuf>,

    /// Output directory (default: out)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Table format: md, csv, or tex (default: all three)
    #[arg(long, global = true)]
    format: Option<String>,

    /// L2-normalize embeddings before evaluation
    #[arg(long, global = true)]
    normalize: bool,

    /// Ridge penalty for the linear fit (default: none)
    #[arg(long, global = true, value_name = "LAMBDA")]
    ridge: Option<f64>,

    /// Fit the PCA once on all rows instead of per training fold
    #[arg(long, global = true)]
    global_pca: bool,

    /// Print what would happen without embedding or writing results
    #[arg(long, global = true)]
    dry_run: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write numeric dataset files
    Generate,
    /// Embed every dataset with every model
    Embed,
    /// Score embeddings and write sweep files
    Evaluate,
    /// Render per-family summary tables
    Report,
    /// Render SVG figures
    Plot,
    /// Run the whole pipeline and index the artifacts
    RunAll,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => config::load_file_config(path)?,
        None => FileConfig::default(),
    };
    let overrides = CliOverrides {
        seed: cli.seed,
        models: cli.models,
        families: cli.families,
        max_precision: cli.max_precision,
        n: cli.n,
        folds: cli.folds,
        cache: cli.cache,
        out: cli.out,
        format: cli.format,
        normalize: cli.normalize,
        ridge: cli.ridge,
        global_pca: cli.global_pca,
        dry_run: cli.dry_run,
    };
    let settings = Settings::resolve(file, overrides)?;
    match cli.command {
        Command::Generate => commands::generate::run(&settings),
        Command::Embed => commands::embed::run(&settings),
        Command::Evaluate => commands::evaluate::run(&settings),
        Command::Report => commands::report::run(&settings),
        Command::Plot => commands::plot::run(&settings),
        Command::RunAll => commands::run_all::run(&settings),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            e.emit();
            ExitCode::from(e.exit_code())
        }
    }
}
