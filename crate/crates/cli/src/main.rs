use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod input;

#[derive(Parser, Debug)]
#[command(
    name = "bangl",
    version,
    about = "Lambek calculus with a relevant modality: prove, compile, evaluate"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Output::Text, global = true)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula, a sequent, or a phrase against a lexicon.
    Parse(ParseArgs),
    /// Search for derivations of a sequent or phrase.
    Prove(ProveArgs),
    /// Compile a derivation to a string diagram term.
    Compile(CompileArgs),
    /// Prove, compile and evaluate a phrase on word tensors.
    Eval(EvalArgs),
    /// Run the ellipsis disambiguation experiment.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
pub struct LexiconArgs {
    /// Lexicon TSV (`word<TAB>formula`). Defaults to the built-in example lexicon.
    #[arg(long, env = "BANGL_LEXICON")]
    pub lexicon: Option<PathBuf>,
    /// Goal formula for a phrase; one S per `.`-separated sentence by default.
    #[arg(long)]
    pub goal: Option<String>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 40)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 1)]
    pub contraction_budget: usize,
    #[arg(long, default_value_t = 16)]
    pub max_solutions: usize,
    /// Search time limit in seconds.
    #[arg(long, default_value_t = 30.0)]
    pub timeout: f64,
}

#[derive(Args, Debug)]
pub struct SpaceArgs {
    /// Dimensions of N and S.
    #[arg(long, default_value = "2,2")]
    pub dims: String,
    /// Fock truncation: `layer:L` or `full`. Defaults to `full` for the
    /// full-dual copying map and `layer:1` otherwise.
    #[arg(long)]
    pub truncation: Option<String>,
    /// Largest full Fock space allowed, in basis vectors.
    #[arg(long, default_value_t = bangl::fock::DEFAULT_FULLDUAL_CAP)]
    pub fulldual_cap: usize,
}

#[derive(Args, Debug)]
struct ParseArgs {
    /// Formula, sequent (`... -> ...`) or phrase.
    input: String,
    /// Treat the input as a phrase even without a lexicon flag.
    #[arg(long)]
    phrase: bool,
    #[command(flatten)]
    lex: LexiconArgs,
}

#[derive(Args, Debug)]
struct ProveArgs {
    /// Sequent (`... -> ...`) or phrase.
    input: String,
    /// List every derivation found, up to --max-solutions.
    #[arg(long)]
    all: bool,
    #[command(flatten)]
    search: SearchArgs,
    #[command(flatten)]
    lex: LexiconArgs,
}

#[derive(Args, Debug)]
struct CompileArgs {
    /// Sequent (`... -> ...`) or phrase.
    input: String,
    /// Which derivation to compile, counting from 1 in search order.
    #[arg(long, default_value_t = 1)]
    reading: usize,
    #[command(flatten)]
    search: SearchArgs,
    #[command(flatten)]
    space: SpaceArgs,
    #[command(flatten)]
    lex: LexiconArgs,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Phrase; `.` separates sentences.
    phrase: String,
    /// Copying map for contraction.
    #[arg(long, default_value = "k-extension")]
    delta: String,
    /// Word tensors TSV (`word<TAB>formula<TAB>values`). Missing entries are random.
    #[arg(long, env = "BANGL_TENSORS")]
    tensors: Option<PathBuf>,
    /// Seed for the random tensors of words missing from --tensors.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Give WORD the projection tensor of its `(!X)\X` typing.
    #[arg(long = "projection", value_name = "WORD")]
    projections: Vec<String>,
    #[arg(long, default_value_t = 1)]
    reading: usize,
    #[command(flatten)]
    search: SearchArgs,
    #[command(flatten)]
    space: SpaceArgs,
    #[command(flatten)]
    lex: LexiconArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AggregationArg {
    PerEntry,
    Averaged,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// word2vec text embeddings.
    #[arg(long, env = "BANGL_EMBEDDINGS")]
    embeddings: PathBuf,
    /// Dataset TSV.
    #[arg(long, env = "BANGL_DATASET")]
    dataset: PathBuf,
    /// Verb/subject/object triples TSV for the verb matrices.
    #[arg(long, env = "BANGL_TRIPLES")]
    triples: PathBuf,
    /// Comma-separated models; all by default.
    #[arg(long, value_delimiter = ',')]
    models: Vec<String>,
    /// Weight of the k-extension model when given by plain name.
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    #[arg(long, value_enum, default_value_t = AggregationArg::PerEntry)]
    aggregation: AggregationArg,
    /// Also write the CSV report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Process outcome: success, or a search that found nothing.
pub enum Outcome {
    Found,
    NoProof,
}

fn require_file(flag: &str, path: &Path) -> Result<()> {
    if !path.is_file() {
        bail!("--{flag}: no such file: {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome> {
    let out = cli.output;
    match cli.command {
        Command::Parse(a) => {
            check_lexicon(&a.lex)?;
            commands::parse(&a.input, a.phrase, &a.lex, out)
        }
        Command::Prove(a) => {
            check_lexicon(&a.lex)?;
            commands::prove(&a.input, a.all, &a.search, &a.lex, out)
        }
        Command::Compile(a) => {
            check_lexicon(&a.lex)?;
            commands::compile(&a.input, a.reading, &a.search, &a.space, &a.lex, out)
        }
        Command::Eval(a) => {
            check_lexicon(&a.lex)?;
            if let Some(p) = &a.tensors {
                require_file("tensors", p)?;
            }
            let opts = commands::EvalOptions {
                delta: &a.delta,
                tensors: a.tensors.as_deref(),
                seed: a.seed,
                projections: &a.projections,
                reading: a.reading,
            };
            commands::eval(&a.phrase, &opts, &a.search, &a.space, &a.lex, out)
        }
        Command::Experiment(a) => {
            require_file("embeddings", &a.embeddings)?;
            require_file("dataset", &a.dataset)?;
            require_file("triples", &a.triples)?;
            let aggregation = match a.aggregation {
                AggregationArg::PerEntry => bangl::distrib::Aggregation::PerEntry,
                AggregationArg::Averaged => bangl::distrib::Aggregation::Averaged,
            };
            commands::experiment(
                &a.embeddings,
                &a.dataset,
                &a.triples,
                &a.models,
                a.k,
                aggregation,
                a.out.as_deref(),
                out,
            )
        }
    }
}

fn check_lexicon(lex: &LexiconArgs) -> Result<()> {
    match &lex.lexicon {
        Some(p) => require_file("lexicon", p).context("lexicon"),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Found) => ExitCode::SUCCESS,
        Ok(Outcome::NoProof) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
