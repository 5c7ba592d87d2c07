//! `surfsteer` command-line front end.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use surfsteer_core::Error;

use commands::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "surfsteer",
    version,
    about = "Random-surfer stationary distributions and how to steer them"
)]
struct Cli {
    /// Log filter (error, warn, info, debug, trace). Overrides RUST_LOG.
    #[arg(long, global = true)]
    log_level: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the stationary distribution of an edge list.
    Stationary(StationaryArgs),
    /// Apply a click-bias, link-insertion or combined modification.
    Modify(ModifyArgs),
    /// Run a seeded experiment sweep.
    Sweep(SweepArgs),
    /// Concentration curve of the stationary distribution.
    Lorenz(LorenzArgs),
    /// Write a synthetic scale-free digraph.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// L1 convergence tolerance of the power iteration.
    #[arg(long, default_value_t = 1e-12)]
    tolerance: f64,
    /// Iteration cap of the power iteration.
    #[arg(long, default_value_t = 100_000)]
    max_iterations: usize,
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// Tab-separated edge list: `src<TAB>dst[<TAB>weight]`.
    input: std::path::PathBuf,
    /// Fail instead of reducing to the largest strongly connected component.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct StationaryArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Output file; a `.meta.json` sidecar is written next to it. Defaults to stdout.
    #[arg(short, long)]
    output: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct ModifyArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Comma-separated target labels.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["targets_file", "phi"])]
    targets: Vec<String>,
    /// File with one target label per line, or a targets CSV.
    #[arg(long, conflicts_with = "phi")]
    targets_file: Option<std::path::PathBuf>,
    /// Sample a random target set of this node fraction.
    #[arg(long)]
    phi: Option<f64>,
    /// Seed for target sampling and combined link selection. Generated and echoed when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// click_bias, link_insertion or combined.
    #[arg(long)]
    strategy: surfsteer_core::Strategy,
    /// Bias strength b (at least 1).
    #[arg(long)]
    bias_strength: f64,
    /// Share of the budget spent on biasing (combined only).
    #[arg(long)]
    alpha: Option<f64>,
    /// Modified edge list; sidecars `.meta.json`, `.metrics.csv` and `.targets.csv` go next to it.
    #[arg(short, long, default_value = "modified.tsv")]
    output: std::path::PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// b in 2..=15.
    Realistic,
    /// b up to 200.
    Saturation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BinningArg {
    EqualWidth,
    EqualCount,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Edge list to sweep over.
    #[arg(required_unless_present = "synthetic", conflicts_with = "synthetic")]
    input: Option<std::path::PathBuf>,
    /// Use the default synthetic scale-free graph instead of an input file.
    #[arg(long)]
    synthetic: bool,
    /// Node count of the synthetic graph.
    #[arg(long, requires = "synthetic")]
    synthetic_nodes: Option<usize>,
    /// Fail instead of reducing to the largest strongly connected component.
    #[arg(long)]
    strict: bool,
    /// `key = value` config file; flags given on the command line override it.
    #[arg(long)]
    config: Option<std::path::PathBuf>,
    /// Preset bias-strength grid.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, value_delimiter = ',')]
    phi: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    bias_strength: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    strategies: Vec<surfsteer_core::Strategy>,
    /// Target-set samples per φ.
    #[arg(long)]
    samples: Option<usize>,
    /// Master seed. Generated and echoed when absent from flags and config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, env = "SURFSTEER_WORKERS")]
    workers: Option<usize>,
    /// Fill the wall_time_ms column (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Result file; `.failures.csv`, `.config` and `.meta.json` go next to it.
    #[arg(short, long, default_value = "sweep.csv")]
    output: std::path::PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Also write per-group degree-ratio bins with this many bins to `.bins.csv`.
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long, value_enum, default_value_t = BinningArg::EqualWidth)]
    binning: BinningArg,
}

#[derive(Debug, Args)]
struct LorenzArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Output CSV. Defaults to stdout.
    #[arg(short, long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 5000)]
    nodes: usize,
    #[arg(long, default_value_t = 8.0)]
    mean_out_degree: f64,
    /// Power-law exponent of the degree distributions.
    #[arg(long, default_value_t = 2.5)]
    exponent: f64,
    #[arg(long, default_value_t = 20_160_101)]
    seed: u64,
    /// Output edge list; a `.meta.json` sidecar is written next to it.
    #[arg(short, long)]
    output: std::path::PathBuf,
}

/// Process exit status for an error.
fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(f) = err.downcast_ref::<Failure>() {
        return match f {
            Failure::PartialSweep(_) => 6,
        };
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Parse { .. } | Error::EmptyGraph | Error::Validation(_)) => 2,
        Some(Error::NotConverged { .. }) => 3,
        Some(Error::NotStronglyConnected { .. } | Error::DanglingNode { .. }) => 4,
        Some(Error::EmptySupport) => 5,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut logger =
        env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"));
    if let Some(level) = &cli.log_level {
        logger.parse_filters(level);
    }
    logger.init();

    let result = match cli.command {
        Command::Stationary(a) => commands::stationary(a),
        Command::Modify(a) => commands::modify(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Lorenz(a) => commands::lorenz(a),
        Command::Generate(a) => commands::generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
