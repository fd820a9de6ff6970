//! Batch command-line interface: satisfiability checking, ground query
//! answering, view learning, and constraint discovery over knowledge base
//! files, with reproducible output.
//!
//! Exit codes separate how a run ended from what it found: 0 means the
//! command completed and printed its verdict, 2 means the input could not
//! be used, 3 means a resource ceiling cut the search short, 4 means the
//! input knowledge base is already inconsistent. SAT versus UNSAT and
//! entailed versus not entailed are payload, never exit codes.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hylog::bias::{Bias, Examples};
use hylog::kb::HybridKb;
use hylog::learn::{minimize_theory, nmdisc, nmlearn, LearnError};
use hylog::parse::{parse_bias, parse_examples, parse_ground_conjunction, parse_kb};
use hylog::reason::{entails_ground, nm_satisfiable, Limits, ReasonError};
use hylog::report;

#[derive(Parser)]
#[command(
    name = "hylog",
    version,
    about = "Reasoning and rule induction over hybrid ontology / Datalog knowledge bases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the knowledge base is satisfiable.
    CheckSat(Common),
    /// Decide whether a ground conjunction is entailed.
    Query {
        #[command(flatten)]
        common: Common,
        /// Ground conjunction, e.g. "FEMALE(mary)" or "boy(paul), MALE(paul)".
        query: String,
    },
    /// Induce view rules for the bias target from labeled examples.
    LearnView(Common),
    /// Search for the integrity theory the facts satisfy.
    Discover {
        #[command(flatten)]
        common: Common,
        /// Drop rules the rest of the theory already entails. Each drop
        /// needs an exhaustive unsatisfiability proof, so this can take
        /// a long time on large theories; bound it with --max-partitions
        /// if you would rather stop than wait.
        #[arg(long)]
        minimize: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Knowledge base file.
    #[arg(long)]
    kb: PathBuf,
    /// Bias file; required by learn-view and discover.
    #[arg(long)]
    bias: Option<PathBuf>,
    /// Examples file; required by learn-view.
    #[arg(long)]
    examples: Option<PathBuf>,
    /// Show search details alongside the result.
    #[arg(long)]
    trace: bool,
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Partition budget per satisfiability question.
    #[arg(long)]
    max_partitions: Option<u64>,
    /// Ceiling on distinct ground datalog atoms.
    #[arg(long)]
    max_herbrand: Option<usize>,
}

/// How a failed run ends: the message for stderr and the exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Failure {
        Failure { code: 2, msg: msg.into() }
    }
}

impl From<ReasonError> for Failure {
    fn from(e: ReasonError) -> Failure {
        Failure { code: 3, msg: format!("resource bound: {e}") }
    }
}

impl From<LearnError> for Failure {
    fn from(e: LearnError) -> Failure {
        match e {
            LearnError::UnsatisfiableBackground => {
                Failure { code: 4, msg: format!("inconsistent input: {e}") }
            }
            LearnError::Reason(r) => r.into(),
            other => Failure::input(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_kb(path: &Path) -> Result<HybridKb, Failure> {
    let text = read(path)?;
    let kb = parse_kb(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    kb.validate().map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(kb)
}

fn load_bias(common: &Common, kb: &HybridKb) -> Result<Bias, Failure> {
    let path = common
        .bias
        .as_ref()
        .ok_or_else(|| Failure::input("this command needs --bias"))?;
    let text = read(path)?;
    let bias =
        parse_bias(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    bias.validate_against(kb)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(bias)
}

fn load_examples(common: &Common) -> Result<Examples, Failure> {
    let path = common
        .examples
        .as_ref()
        .ok_or_else(|| Failure::input("this command needs --examples"))?;
    let text = read(path)?;
    parse_examples(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn limits_of(common: &Common) -> Limits {
    let mut limits = Limits::default();
    if let Some(p) = common.max_partitions {
        limits.max_partitions = p;
    }
    if let Some(h) = common.max_herbrand {
        limits.max_herbrand = h;
    }
    limits
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::CheckSat(common) => {
            let kb = load_kb(&common.kb)?;
            let report = nm_satisfiable(&kb, &limits_of(&common))?;
            Ok(match common.format {
                Format::Text => report::check_sat_text(&report, common.trace),
                Format::Json => report::render(&report::check_sat_json(&report)),
            })
        }
        Command::Query { common, query } => {
            let kb = load_kb(&common.kb)?;
            let atoms = parse_ground_conjunction(&query)
                .map_err(|e| Failure::input(format!("query: {e}")))?;
            let entailed = entails_ground(&kb, &atoms, &limits_of(&common))?;
            Ok(match common.format {
                Format::Text => report::query_text(entailed),
                Format::Json => report::render(&report::query_json(&atoms, entailed)),
            })
        }
        Command::LearnView(common) => {
            let kb = load_kb(&common.kb)?;
            let bias = load_bias(&common, &kb)?;
            let examples = load_examples(&common)?;
            let out = nmlearn(&kb, &bias, &examples, &limits_of(&common))?;
            Ok(match common.format {
                Format::Text => report::learn_text(&out, common.trace),
                Format::Json => report::render(&report::learn_json(&out, common.trace)),
            })
        }
        Command::Discover { common, minimize } => {
            let mut kb = load_kb(&common.kb)?;
            let bias = load_bias(&common, &kb)?;
            let facts = std::mem::take(&mut kb.facts);
            let limits = limits_of(&common);
            let mut out = nmdisc(&kb, &facts, &bias, &limits)?;
            if minimize {
                let before = out.theory.rules.len();
                out.theory = minimize_theory(&out.theory, &kb, &facts, &limits)?;
                let dropped = before - out.theory.rules.len();
                if dropped > 0 {
                    out.warnings.push(format!(
                        "minimization dropped {dropped} rule(s) the rest of the theory entails"
                    ));
                }
            }
            Ok(match common.format {
                Format::Text => report::discover_text(&out, common.trace),
                Format::Json => report::render(&report::discover_json(&out, common.trace)),
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            // A closed pipe downstream is a normal way to stop reading.
            use std::io::Write;
            let _ = std::io::stdout().write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
