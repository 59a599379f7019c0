//! `cogtwin` command-line front end: corpus synthesis, graph formation,
//! training, evaluation, prediction and similarity search.
//!
//! Exit codes: 0 success, 1 usage error, 2 input validation error,
//! 3 numerical failure.

mod commands;
mod files;
pub mod query;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::RunConfig;

/// Environment variable naming the directory relative paths resolve against.
pub const DATA_DIR_ENV: &str = "COGTWIN_DATA_DIR";

#[derive(Debug, Parser)]
#[command(name = "cogtwin", version, about = "Product-graph classification and similarity search")]
pub struct Cli {
    /// Print progress to stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    /// Directory that relative input and output paths are resolved against.
    #[arg(long, global = true, env = DATA_DIR_ENV)]
    pub data_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic product corpus (JSON lines).
    CorpusSynth(SynthArgs),
    /// Turn a corpus into one labeled subgraph per record.
    Form(FormArgs),
    /// Train a model on a subgraph file.
    Train(TrainArgs),
    /// Evaluate a model on labeled subgraphs.
    Eval(EvalArgs),
    /// Predict labels for subgraphs.
    Predict(PredictArgs),
    /// Rank products by similarity to one of them.
    Query(QueryArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Records per category, e.g. `Car=10,Gear=10`. Defaults to the full
    /// six-category corpus.
    #[arg(long, value_parser = parse_counts)]
    pub counts: Option<Counts>,
    /// Probability that a token slot draws from the category vocabulary.
    #[arg(long, default_value_t = 0.9)]
    pub vocab_strength: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FormArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Schema query JSON; the default schema when omitted.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub graphs: PathBuf,
    /// JSON with optional `model` and `train` sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seeds the split, the initialization and the batch order.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub split_fraction: Option<f64>,
    /// Number of conv layers; each copies the first layer's shape.
    #[arg(long)]
    pub layers: Option<usize>,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Training report (JSON).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Held-out split as a subgraph file.
    #[arg(long)]
    pub test_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub graphs: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Metrics JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub graphs: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Predictions JSON; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub graphs: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Id of the anchor product.
    #[arg(long)]
    pub like: String,
    #[arg(long, default_value_t = 5)]
    pub top_n: usize,
    /// Result JSON; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts(pub Vec<(String, usize)>);

fn parse_counts(text: &str) -> Result<Counts, String> {
    let mut out = Vec::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        let (name, n) = part
            .split_once('=')
            .ok_or_else(|| format!("`{part}` is not of the form Category=count"))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|e| format!("count for `{}`: {e}", name.trim()))?;
        out.push((name.trim().to_string(), n));
    }
    if out.is_empty() {
        return Err("no counts given".into());
    }
    Ok(Counts(out))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code. Errors are reported on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.exit_code() == 0 { 0 } else { 1 };
        }
    };
    match commands::execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
