//! `webir` — batch front end for the retrieval pipeline.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/format error,
//! 3 ranking failed to converge.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(anyhow::Error),
    NonConvergence(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "webir",
    version,
    about = "Ingest a linked corpus, rank it, deduplicate it, search it, and evaluate the results"
)]
struct Cli {
    /// Optional TOML configuration file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Artifact directory read and written by the commands.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ingest a corpus file breadth-first from seed documents.
    Ingest(IngestArgs),
    /// Score pages query-independently (pagerank) or per query (hits).
    Rank(RankArgs),
    /// Report near-duplicate document pairs by shingle resemblance.
    Dedup(DedupArgs),
    /// Run queries against the index and emit a TREC-format run file.
    Search(SearchArgs),
    /// Evaluate a run file against relevance judgments.
    Eval(EvalArgs),
    /// Pool the top documents of several runs into a judging worksheet.
    Pool(PoolArgs),
}

#[derive(Debug, clap::Args)]
struct IngestArgs {
    /// Corpus file: `doc_id<TAB>uri<TAB>outlinks<TAB>text`, one per line.
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
    /// Comma-separated seed doc_ids.
    #[arg(long, value_delimiter = ',', value_name = "IDS")]
    seeds: Option<Vec<String>>,
    /// Maximum link distance from a seed (unbounded if omitted).
    #[arg(long, value_name = "N")]
    max_depth: Option<usize>,
    /// Maximum number of documents to ingest (unbounded if omitted).
    #[arg(long, value_name = "N")]
    max_docs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Pagerank,
    Hits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    Literal,
    Normalized,
}

#[derive(Debug, clap::Args)]
struct RankArgs {
    #[arg(long, value_enum, value_name = "ALGO")]
    algorithm: Algorithm,
    /// PageRank damping factor in (0, 1).
    #[arg(long, value_name = "D")]
    damping: Option<f64>,
    /// PageRank iteration form.
    #[arg(long, value_enum, value_name = "V")]
    variant: Option<Variant>,
    /// Convergence tolerance (L1 for pagerank, max-norm for hits).
    #[arg(long, value_name = "EPS")]
    tolerance: Option<f64>,
    #[arg(long, value_name = "N")]
    max_iterations: Option<usize>,
    /// Query text; required by (and only valid for) hits.
    #[arg(long, value_name = "TEXT")]
    query: Option<String>,
    /// Root set size for the query subgraph.
    #[arg(long, value_name = "N")]
    root_size: Option<usize>,
    /// Keep the root set as-is instead of expanding to its neighbors.
    #[arg(long)]
    no_expand: bool,
}

#[derive(Debug, clap::Args)]
struct DedupArgs {
    /// Shingle window size in tokens.
    #[arg(long, value_name = "W")]
    w: Option<usize>,
    /// Resemblance threshold in (0, 1].
    #[arg(long, value_name = "T")]
    threshold: Option<f64>,
}

#[derive(Debug, clap::Args)]
struct SearchArgs {
    /// Single query text (use with --topic).
    #[arg(long, value_name = "TEXT", conflicts_with = "queries")]
    query: Option<String>,
    /// Topic id recorded in the run file for --query.
    #[arg(long, value_name = "ID", requires = "query")]
    topic: Option<String>,
    /// Batch file of `topic_id<TAB>query text` lines.
    #[arg(long, value_name = "FILE")]
    queries: Option<PathBuf>,
    /// Weight of the text score against the link prior, in [0, 1].
    #[arg(long, value_name = "A")]
    alpha: Option<f64>,
    /// Maximum results per topic.
    #[arg(long, value_name = "N")]
    limit: Option<usize>,
    /// System tag written in the run file.
    #[arg(long, value_name = "TAG")]
    tag: Option<String>,
    /// Run file name inside the artifact directory.
    #[arg(long, value_name = "NAME", default_value = "run.tsv")]
    run_file: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GainArg {
    Linear,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DiscountArg {
    /// log2(k + 1)
    Log2k1,
    /// max(1, log2 k)
    Maxlog2k,
    /// constant 1 (no rank discounting)
    Flat,
}

#[derive(Debug, clap::Args)]
struct EvalArgs {
    /// Run file: `topic Q0 doc_id rank score tag`.
    #[arg(long, value_name = "FILE")]
    run: PathBuf,
    /// Qrels file: `topic iter doc_id grade`.
    #[arg(long, value_name = "FILE")]
    qrels: PathBuf,
    /// Comma-separated measures, e.g. precision@10,recall@10,dcg@10.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    measures: Option<Vec<String>>,
    #[arg(long, value_enum, value_name = "KIND")]
    gain: Option<GainArg>,
    #[arg(long, value_enum, value_name = "KIND")]
    discount: Option<DiscountArg>,
    /// Skip writing per-topic curve files.
    #[arg(long)]
    no_curves: bool,
}

#[derive(Debug, clap::Args)]
struct PoolArgs {
    /// Comma-separated run files to pool.
    #[arg(long, value_delimiter = ',', value_name = "FILES", required = true)]
    runs: Vec<PathBuf>,
    /// Top-N cutoff contributed by each run.
    #[arg(long, value_name = "N")]
    pool_depth: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap renders its own message (help goes to stdout)
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let file_config = match config::FileConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return report(e),
    };
    let out_dir = cli
        .out
        .clone()
        .or_else(|| file_config.out.clone())
        .unwrap_or_else(|| PathBuf::from("artifacts"));

    let result = match &cli.command {
        Command::Ingest(args) => commands::ingest(args, &file_config, &out_dir),
        Command::Rank(args) => commands::rank(args, &file_config, &out_dir),
        Command::Dedup(args) => commands::dedup(args, &file_config, &out_dir),
        Command::Search(args) => commands::search(args, &file_config, &out_dir),
        Command::Eval(args) => commands::eval(args, &file_config, &out_dir),
        Command::Pool(args) => commands::pool(args, &file_config, &out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> ExitCode {
    match &e {
        CliError::Usage(msg) => eprintln!("error: {msg}"),
        CliError::Data(err) => eprintln!("error: {err:#}"),
        CliError::NonConvergence(msg) => eprintln!("error: {msg}"),
    }
    ExitCode::from(e.exit_code())
}
