//! Command-line interface for the edparse toolkit.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "edparse", version, about = "Transition-based enhanced UD graph parsing")]
struct Cli {
    /// Worker threads for per-sentence work; 0 uses every core.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the oracle transition sequence of every gold sentence.
    Oracle(OracleArgs),
    /// Check that oracle sequences rebuild the gold graphs.
    Replay(ReplayArgs),
    /// Train an averaged perceptron on oracle decisions.
    Train(TrainArgs),
    /// Parse sentences and write CoNLL-U with DEPS filled in.
    Parse(ParseArgs),
    /// Score predicted DEPS against gold with ELAS.
    Eval(EvalArgs),
    /// Check that every node is reachable from the root.
    Validate(InputArgs),
    /// Print the enhanced label inventory.
    Stats(StatsArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// CoNLL-U input; standard input when absent or `-`.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Trace output; standard output when absent or `-`.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Transition budget per word.
    #[arg(long, default_value_t = edparse::oracle::BUDGET_PER_WORD)]
    budget_mult: usize,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Replay these trace blocks instead of running the oracle.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Training treebanks, concatenated in order.
    #[arg(long)]
    input: Vec<PathBuf>,
    /// Model output path.
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hashed feature space size.
    #[arg(long, default_value_t = edparse::policy::features::DEFAULT_FEATURE_DIM)]
    feature_dim: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PolicyKind {
    /// Follow the static oracle for `--gold`.
    Oracle,
    /// Shift everything and leave attachment to repair.
    Shift,
    /// Copy the basic tree into DEPS.
    CopyTree,
}

#[derive(Args, Debug)]
struct ParseArgs {
    #[command(flatten)]
    input: InputArgs,
    /// CoNLL-U output; standard output when absent or `-`.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Trained model.
    #[arg(long, conflicts_with = "policy", required_unless_present = "policy")]
    model: Option<PathBuf>,
    /// Built-in policy used instead of a model.
    #[arg(long, value_enum)]
    policy: Option<PolicyKind>,
    /// Gold treebank for `--policy oracle`.
    #[arg(long, required_if_eq("policy", "oracle"))]
    gold: Option<PathBuf>,
    /// Transition budget per word.
    #[arg(long, default_value_t = edparse::oracle::BUDGET_PER_WORD)]
    budget_mult: usize,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    gold: PathBuf,
    /// Prediction; standard input when absent or `-`.
    #[arg(long)]
    pred: Option<PathBuf>,
    /// Also print per-label scores.
    #[arg(long)]
    per_label: bool,
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// Treebanks, concatenated in order; standard input when absent.
    #[arg(long)]
    input: Vec<PathBuf>,
}

/// Exit status of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    Success,
    /// Validation or derivability failure.
    Failed,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(1);
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Oracle(args) => commands::oracle(args),
        Command::Replay(args) => commands::replay(args),
        Command::Train(args) => commands::train(args),
        Command::Parse(args) => commands::parse_cmd(args),
        Command::Eval(args) => commands::eval(args),
        Command::Validate(args) => commands::validate(args),
        Command::Stats(args) => commands::stats(args),
    });
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(1)
        }
    }
}
