//! Command-line driver for the patienteg pipeline.
//!
//! `build` runs every stage; `preprocess`, `map`, `temporal`, and
//! `match` run one stage against the same output directory, so a
//! stage-by-stage run reproduces `build` exactly. `query` and `stats`
//! operate on any set of N-Triples files.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or query parse
//! error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use patienteg::pipeline::{self, PipelineConfig, TemporalMode};
use patienteg::query;

#[derive(Parser)]
#[command(name = "patienteg", version, about = "EMR tables to patient event graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Pipeline configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TemporalArgs {
    /// Override the configured temporal construction mode.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<TemporalMode>,
}

#[derive(Args)]
struct SeedArgs {
    /// Override the configured sampling seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_mode(s: &str) -> Result<TemporalMode, String> {
    TemporalMode::from_name(s).ok_or_else(|| format!("expected full or reduced, got {s:?}"))
}

#[derive(Subcommand)]
enum Command {
    /// Clean the input tables into out/preprocessed/.
    Preprocess(ConfigArgs),
    /// Convert preprocessed tables to events.nt and registry.json.
    Map(ConfigArgs),
    /// Build temporal.nt and the per-patient relation report.
    Temporal {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        temporal: TemporalArgs,
    },
    /// Link registry entities to the terminology graph (links.nt).
    Match {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Run every stage and write stats.csv.
    Build {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        temporal: TemporalArgs,
        #[command(flatten)]
        seed: SeedArgs,
    },
    /// Evaluate a query file against one or more N-Triples files.
    Query {
        /// Query file (.rq-style text).
        #[arg(long)]
        query: PathBuf,
        /// N-Triples files to load.
        #[arg(required = true)]
        stores: Vec<PathBuf>,
    },
    /// Print dataset statistics for one or more N-Triples files.
    Stats {
        /// N-Triples files to load.
        #[arg(required = true)]
        stores: Vec<PathBuf>,
    },
}

/// Failures split by exit code: 1 for runtime errors, 2 for anything
/// that reflects bad input syntax.
enum CliError {
    Runtime(anyhow::Error),
    Usage(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> CliError {
        CliError::Runtime(e.into())
    }
}

fn load_config(args: &ConfigArgs) -> Result<PipelineConfig> {
    let mut config = PipelineConfig::load(&args.config)?;
    if let Some(out) = &args.out {
        config.out = out.clone();
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Preprocess(args) => {
            let config = load_config(&args)?;
            std::fs::create_dir_all(&config.out).context("creating the output directory")?;
            pipeline::run_preprocess(&config)?;
        }
        Command::Map(args) => {
            pipeline::run_map(&load_config(&args)?)?;
        }
        Command::Temporal { config, temporal } => {
            let mut config = load_config(&config)?;
            if let Some(mode) = temporal.mode {
                config.temporal_mode = mode;
            }
            pipeline::run_temporal(&config)?;
        }
        Command::Match { config, seed } => {
            let mut config = load_config(&config)?;
            if let Some(seed) = seed.seed {
                config.seed = seed;
            }
            pipeline::run_match(&config)?;
        }
        Command::Build { config, temporal, seed } => {
            let mut config = load_config(&config)?;
            if let Some(mode) = temporal.mode {
                config.temporal_mode = mode;
            }
            if let Some(seed) = seed.seed {
                config.seed = seed;
            }
            let stats = pipeline::run_pipeline(&config)?;
            print!("{}", stats.to_csv());
        }
        Command::Query { query: query_path, stores } => {
            let text = std::fs::read_to_string(&query_path)
                .with_context(|| format!("reading {}", query_path.display()))?;
            let parsed = query::parse_query(&text).map_err(|e| {
                CliError::Usage(
                    anyhow::Error::new(e).context(format!("parsing {}", query_path.display())),
                )
            })?;
            let store = pipeline::load_store(&stores)?;
            print!("{}", query::render_result(&query::evaluate(&store, &parsed)));
        }
        Command::Stats { stores } => {
            let store = pipeline::load_store(&stores)?;
            print!("{}", pipeline::DatasetStats::from_store(&store).to_csv());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
