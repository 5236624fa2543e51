use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;

#[derive(Debug, Parser)]
#[command(
    name = "relprop",
    version,
    about = "Re-rank retrieval results by propagating match similarity over an image graph"
)]
struct Cli {
    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a match graph from a pairwise inlier file.
    BuildGraph(BuildGraphArgs),
    /// Rank the corpus for one query.
    Rank(RankArgs),
    /// Score ranking files against ground truth.
    Eval(EvalArgs),
    /// Evaluate a parameter grid and write a CSV table.
    Sweep(SweepArgs),
    /// Generate a synthetic corpus.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct BuildGraphArgs {
    /// Tab-separated `u v inliers` file.
    #[arg(long)]
    matches: PathBuf,
    /// Inlier threshold θ.
    #[arg(long)]
    theta: Option<u64>,
    /// Kernel scale σ.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Clone)]
struct PipelineFlags {
    /// Root set size |V_R|.
    #[arg(long)]
    roots: Option<usize>,
    /// Subgraph search depth M.
    #[arg(long)]
    depth: Option<usize>,
    /// Decay factor α.
    #[arg(long)]
    alpha: Option<f64>,
    /// Direct-relevance weight γ.
    #[arg(long)]
    gamma: Option<f64>,
    /// Propagation distance N.
    #[arg(long)]
    iters: Option<usize>,
    /// Stop propagating once a step changes no score by more than this.
    #[arg(long)]
    tol: Option<f64>,
    /// Propagate over the whole graph instead of a query subgraph.
    #[arg(long)]
    no_subgraph: bool,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true))]
struct RankArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Tab-separated `id inliers` file for an external query.
    #[arg(long, group = "source")]
    query: Option<PathBuf>,
    /// Use a corpus image as the query.
    #[arg(long, group = "source")]
    query_id: Option<String>,
    #[command(flatten)]
    pipeline: PipelineFlags,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// JSON ground truth.
    #[arg(long)]
    truth: PathBuf,
    /// Also write per-query AP as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Ranking files; the file stem is the query id.
    #[arg(required = true)]
    rankings: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Directory of query files; each file stem is a query id.
    #[arg(long)]
    queries: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, value_delimiter = ',')]
    roots: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    depth: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    iters: Vec<usize>,
    /// Grid points evaluated concurrently.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Model {
    Chain,
    Clusters,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,

    /// chain: relevant images k.
    #[arg(long, help_heading = "Chain model")]
    relevant: Option<usize>,
    /// chain: noise images.
    #[arg(long, help_heading = "Chain model")]
    noise: Option<usize>,
    /// chain: inliers between the query and the first image.
    #[arg(long, help_heading = "Chain model")]
    query_inliers: Option<u64>,

    #[arg(long, help_heading = "Clusters model")]
    distractors: Option<usize>,
    #[arg(long, help_heading = "Clusters model")]
    relevant_size: Option<usize>,
    #[arg(long, help_heading = "Clusters model")]
    distractor_size: Option<usize>,
    #[arg(long, help_heading = "Clusters model")]
    reach: Option<usize>,
    #[arg(long, help_heading = "Clusters model")]
    relevant_density: Option<f64>,
    #[arg(long, help_heading = "Clusters model")]
    distractor_density: Option<f64>,
    #[arg(long, help_heading = "Clusters model")]
    hubs: Option<usize>,
    #[arg(long, help_heading = "Clusters model")]
    hub_fanout: Option<usize>,
    #[arg(long, help_heading = "Clusters model")]
    queries: Option<usize>,
    #[arg(long, help_heading = "Clusters model")]
    query_matches: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    Core(relprop::Error),
    Config(String),
}

impl From<relprop::Error> for CliError {
    fn from(e: relprop::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    fn name(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.name(),
            CliError::Config(_) => "ConfigError",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(relprop::Error::NoDirectMatches) => 3,
            CliError::Core(relprop::Error::Io(_)) => 4,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => e.fmt(f),
            CliError::Config(msg) => write!(f, "invalid config file: {msg}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let quiet = cli.quiet;
    let result = match cli.command {
        Command::BuildGraph(args) => commands::build_graph(args, quiet),
        Command::Rank(args) => commands::rank(args, quiet),
        Command::Eval(args) => commands::eval(args),
        Command::Sweep(args) => commands::sweep(args, quiet),
        Command::Synth(args) => commands::synth(args, quiet),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(e.exit_code())
        }
    }
}
