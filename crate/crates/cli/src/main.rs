//! `graphcap`: one subcommand per pipeline, JSON on standard output and a
//! one-line summary or diagnostic on standard error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphcap::npo::{ClosureForm, Variant};

use commands::{CliError, Status};

const ALPHA_BUDGET: &str = "10000000000";
const SEARCH_BUDGET: &str = "1000000000";

#[derive(Parser, Debug)]
#[command(
    name = "graphcap",
    version,
    about = "Automata-theoretic bounds on the zero-error capacity of graphs"
)]
struct Cli {
    /// Seed for randomized internals.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker cap; every pipeline is currently sequential.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Independence number of a strong power, with the codewords.
    Alpha(AlphaArgs),
    /// Growth rate of an automaton.
    Growth(DfaArg),
    /// Zero-error code check by flood-fill and by product automaton.
    Check(CheckArgs),
    /// Restrict an automaton to one strongly connected component.
    Simplify(SimplifyArgs),
    /// Best reversible automaton on at most the given number of states.
    SearchRev(SearchArgs),
    /// Reversible automaton for a block code.
    Rewind(RewindArgs),
    /// Closed-form relations between capacity and reversible capacity.
    Bounds(BoundsArgs),
    /// DIMACS encoding of the reversible search, or decoding of a model.
    SatExport(SatArgs),
    /// Capacity of a quantum automaton.
    QfaCapacity(QfaArgs),
    /// Moment relaxation of the capacity problem in SDPA sparse format.
    NpoExport(NpoExportArgs),
    /// Evaluate the capacity problem on the operators of a reversible automaton.
    VerifyEmbedding(EmbeddingArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct GraphSource {
    /// Named graph: cN, kN, eN or prodpow:NAME:K.
    #[arg(long)]
    graph: Option<String>,
    /// Graph file with `p n m` and `e u v` lines.
    #[arg(long, value_name = "PATH")]
    graph_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = false, multiple = false)]
struct OptionalGraph {
    #[arg(long)]
    graph: Option<String>,
    #[arg(long, value_name = "PATH")]
    graph_file: Option<PathBuf>,
    /// Number of vertices, when no graph is given.
    #[arg(long)]
    size: Option<usize>,
}

#[derive(Args, Debug)]
struct DfaArg {
    /// Automaton file with `dfa d k`, `init s`, `accept ...`, `t s x t'` lines.
    #[arg(long, value_name = "PATH")]
    dfa: PathBuf,
}

#[derive(Args, Debug)]
struct AlphaArgs {
    #[command(flatten)]
    graph: GraphSource,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    power: u32,
    /// Search-tree node cap.
    #[arg(long, env = "GRAPHCAP_BUDGET", default_value = ALPHA_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    graph: GraphSource,
    #[command(flatten)]
    dfa: DfaArg,
}

#[derive(Args, Debug)]
struct SimplifyArgs {
    #[command(flatten)]
    dfa: DfaArg,
    /// Keep a component of at least this growth.
    #[arg(long)]
    target_growth: Option<f64>,
    /// Write the simplified automaton here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[command(flatten)]
    graph: GraphSource,
    /// Maximum number of states.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    states: u32,
    /// Search-tree node cap.
    #[arg(long, env = "GRAPHCAP_BUDGET", default_value = SEARCH_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Write the best automaton here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RewindArgs {
    #[command(flatten)]
    graph: GraphSource,
    /// Codewords separated by `;`, symbols by spaces or commas.
    #[arg(long, required_unless_present = "power", conflicts_with = "power")]
    codewords: Option<String>,
    /// Use a maximum independent set of this strong power.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    power: Option<u32>,
    /// Search-tree node cap for `--power`.
    #[arg(long, env = "GRAPHCAP_BUDGET", default_value = ALPHA_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Write the automaton here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[command(flatten)]
    graph: OptionalGraph,
    /// Capacity estimate; reports the implied reversible-capacity lower bound.
    #[arg(long, required_unless_present_any = ["theta_rev", "epsilon"])]
    theta: Option<f64>,
    /// Reversible capacity; reports the implied capacity upper bound.
    #[arg(long)]
    theta_rev: Option<f64>,
    /// Accuracy; reports the join size that makes the two capacities that close.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args, Debug)]
struct SatArgs {
    #[command(flatten)]
    graph: GraphSource,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    states: u32,
    /// Write the formula here.
    #[arg(long, value_name = "PATH", required_unless_present = "model")]
    out: Option<PathBuf>,
    /// Decode a solver model instead of exporting.
    #[arg(long, value_name = "PATH", conflicts_with = "out")]
    model: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QfaArgs {
    /// Reversible automaton to embed.
    #[arg(
        long,
        value_name = "PATH",
        required_unless_present = "qfa",
        conflicts_with = "qfa"
    )]
    dfa: Option<PathBuf>,
    /// Quantum automaton in JSON.
    #[arg(long, value_name = "PATH")]
    qfa: Option<PathBuf>,
    /// Also report the finite-length value at this length.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    length: Option<u32>,
    /// Compute the finite-length value by enumerating all strings.
    #[arg(long, requires = "length")]
    enumerate: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VariantArg {
    Transition,
    Conjugation,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ClosureArg {
    Predecessor,
    Successor,
}

#[derive(Args, Debug)]
struct ProblemArgs {
    #[arg(long, value_enum, default_value = "transition")]
    variant: VariantArg,
    /// Orientation of the final-set closure equations.
    #[arg(long, value_enum, default_value = "predecessor")]
    closure: ClosureArg,
    /// Add the swap relations for pair variables.
    #[arg(long)]
    redundant_swap: bool,
}

impl ProblemArgs {
    fn options(&self) -> graphcap::npo::BuildOptions {
        graphcap::npo::BuildOptions {
            variant: match self.variant {
                VariantArg::Transition => Variant::Transition,
                VariantArg::Conjugation => Variant::Conjugation,
            },
            closure: match self.closure {
                ClosureArg::Predecessor => ClosureForm::Predecessor,
                ClosureArg::Successor => ClosureForm::Successor,
            },
            redundant_swap: self.redundant_swap,
        }
    }
}

#[derive(Args, Debug)]
struct NpoExportArgs {
    #[command(flatten)]
    graph: GraphSource,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Relaxation level.
    #[arg(long, default_value_t = 1)]
    level: usize,
    /// SDPA output file.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Also write a text dump of the Hermitian problem.
    #[arg(long, value_name = "PATH")]
    dump: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EmbeddingArgs {
    #[command(flatten)]
    graph: GraphSource,
    #[command(flatten)]
    dfa: DfaArg,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Evaluate the Hermitian form of the problem.
    #[arg(long)]
    hermitize: bool,
    /// Also check the induced point of the relaxation at this level.
    #[arg(long)]
    level: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let line: Vec<&str> = text
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with("For more information"))
                .collect();
            eprintln!("{}", line.join(" "));
            return ExitCode::from(Status::Invalid.code());
        }
    };
    match commands::run(cli) {
        Ok(out) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&out.json).expect("JSON values serialize")
            );
            eprintln!("{}", out.summary);
            ExitCode::from(out.status.code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status().code())
        }
    }
}

impl CliError {
    fn status(&self) -> Status {
        match self {
            CliError::Core(graphcap::Error::BudgetExceeded(_)) => Status::Budget,
            CliError::Internal(_) => Status::Disagreement,
            _ => Status::Invalid,
        }
    }
}
