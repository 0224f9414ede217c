//! `dynlid` — pipeline CLI for dynamic-graph NC-LID analytics.
//!
//! One subcommand per pipeline stage so expensive stages can be rerun and
//! cached independently: `stats`, `nclid`, `embed`, `tune`, `evaluate`,
//! `report`. Every stage writes a JSON manifest beside its outputs and is
//! idempotent given the same manifest (bit-identical outputs in
//! deterministic mode).
//!
//! Exit codes: 0 success, 1 internal error, 2 input error, 3 missing
//! upstream artifact.

mod commands;
mod manifest;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

/// Environment variable overriding the worker-pool size.
pub const THREADS_ENV: &str = "DYNLID_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "dynlid",
    version,
    about = "Dynamic-graph NC-LID analytics pipeline"
)]
struct Cli {
    /// Worker pool size (0 = all cores); DYNLID_THREADS overrides
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
#[command(group(ArgGroup::new("binning").required(true).args(["snapshots", "resolution"])))]
struct InputArgs {
    /// Temporal edge list: `source target timestamp [weight]` per line,
    /// '#'/'%' comments
    #[arg(long)]
    input: PathBuf,
    /// Split the time range into this many equal-width snapshots
    #[arg(long)]
    snapshots: Option<usize>,
    /// Snapshot width in time units, anchored at the first event
    #[arg(long)]
    resolution: Option<i64>,
}

#[derive(Debug, Args, Clone)]
struct WalkBaseArgs {
    /// Random walks sampled per start node
    #[arg(long, default_value_t = 10)]
    walks: usize,
    /// Maximum walk length in nodes
    #[arg(long, default_value_t = 32)]
    walk_length: usize,
}

#[derive(Debug, Args, Clone)]
struct WalkArgs {
    /// Return parameter p
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// In-out parameter q
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    #[command(flatten)]
    base: WalkBaseArgs,
}

#[derive(Debug, Args, Clone)]
struct SgnsBaseArgs {
    /// Skip-gram context radius
    #[arg(long, default_value_t = 10)]
    window: usize,
    /// Negative samples per positive pair
    #[arg(long, default_value_t = 5)]
    negatives: usize,
    /// Training epochs for the initial snapshot
    #[arg(long, default_value_t = 5)]
    epochs_initial: usize,
    /// Training epochs per incremental update
    #[arg(long, default_value_t = 1)]
    epochs_update: usize,
}

#[derive(Debug, Args, Clone)]
struct SgnsArgs {
    /// Embedding dimension
    #[arg(long, default_value_t = 100)]
    dim: usize,
    #[command(flatten)]
    base: SgnsBaseArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dataset summary: |V|, |E|, snapshot count, node/link activation
    Stats {
        #[command(flatten)]
        input: InputArgs,
        /// Output directory for the CSV/JSON summary
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-snapshot (or temporal) NC-LID scores
    Nclid {
        #[command(flatten)]
        input: InputArgs,
        /// Community fitness resolution
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Use temporal distances on the aggregated graph instead of
        /// per-snapshot hops
        #[arg(long)]
        temporal: bool,
        /// Also write the natural communities as JSON
        #[arg(long)]
        dump_communities: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train dynamic embeddings and write per-snapshot vector files
    Embed {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        sgns: SgnsArgs,
        /// Master seed for all stochastic stages
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Single-worker SGNS training (bit-reproducible output)
        #[arg(long)]
        deterministic: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep (p, q, dim) and report run-averaged last-snapshot metrics
    Tune {
        #[command(flatten)]
        input: InputArgs,
        /// Grid of p values
        #[arg(long = "p", value_delimiter = ',', num_args = 1.., default_values_t = vec![0.25, 0.5, 1.0, 2.0, 4.0])]
        p_grid: Vec<f64>,
        /// Grid of q values
        #[arg(long = "q", value_delimiter = ',', num_args = 1.., default_values_t = vec![0.25, 0.5, 1.0, 2.0, 4.0])]
        q_grid: Vec<f64>,
        /// Grid of embedding dimensions
        #[arg(long = "dim", value_delimiter = ',', num_args = 1.., default_values_t = vec![10, 25, 50, 100, 200])]
        dims: Vec<usize>,
        /// Embedding runs averaged per configuration
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[command(flatten)]
        walk: WalkBaseArgs,
        #[command(flatten)]
        sgns: SgnsBaseArgs,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct each snapshot from stored embeddings and score it
    Evaluate {
        #[command(flatten)]
        input: InputArgs,
        /// Directory holding the `embed` outputs; reports are written here
        #[arg(long)]
        out: PathBuf,
    },
    /// Join NC-LID, centralities and reconstruction metrics into the
    /// statistics report and plot-ready tables
    Report {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Directory holding `nclid` and `evaluate` outputs
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable/malformed input or invalid configuration (exit 2).
    Input(anyhow::Error),
    /// An upstream stage's output is missing (exit 3).
    MissingArtifact(PathBuf),
    /// Everything else (exit 1).
    Internal(anyhow::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Input(_) => 2,
            Failure::MissingArtifact(_) => 3,
        }
    }
}

pub type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(cli.threads);
    if threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            log::warn!("could not size the worker pool: {e}");
        }
    }

    let result = match cli.command {
        Command::Stats { input, out } => commands::stats::run(&input, out.as_deref()),
        Command::Nclid {
            input,
            alpha,
            temporal,
            dump_communities,
            out,
        } => commands::nclid::run(&input, alpha, temporal, dump_communities, out.as_deref()),
        Command::Embed {
            input,
            walk,
            sgns,
            seed,
            deterministic,
            out,
        } => {
            let workers = if deterministic {
                1
            } else {
                effective_workers(threads)
            };
            commands::embed::run(&input, &walk, &sgns, seed, workers, &out)
        }
        Command::Tune {
            input,
            p_grid,
            q_grid,
            dims,
            runs,
            walk,
            sgns,
            seed,
            out,
        } => commands::tune::run(
            &input, &p_grid, &q_grid, &dims, runs, &walk, &sgns, seed, &out,
        ),
        Command::Evaluate { input, out } => commands::evaluate::run(&input, &out),
        Command::Report { input, alpha, out } => commands::report::run(&input, alpha, &out),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Input(e) => eprintln!("error: {e:#}"),
                Failure::MissingArtifact(path) => {
                    eprintln!(
                        "error: missing upstream artifact {} — run the producing stage first",
                        path.display()
                    )
                }
                Failure::Internal(e) => eprintln!("internal error: {e:#}"),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}

fn effective_workers(threads: usize) -> usize {
    if threads == 0 {
        rayon::current_num_threads()
    } else {
        threads
    }
}
