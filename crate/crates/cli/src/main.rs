//! `locver`: run proof-labeling schemes, certificate searches and lower-bound
//! experiments from the command line.
//!
//! Exit codes: 0 accept/pass, 2 reject/counterexample, 1 usage or parse error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

#[derive(Debug, Parser)]
#[command(name = "locver", version, about = "Proof-labeling scheme simulator")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Report file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest local certificate width searched.
    #[arg(long, global = true)]
    budget_local_bits: Option<usize>,
    /// Largest global certificate length searched.
    #[arg(long, global = true)]
    budget_global_bits: Option<usize>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Strict,
    Inclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputsArg {
    Plain,
    Selections,
    EdgeMarks,
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundArg {
    /// Smallest power of two at least `n`.
    Pow2,
    /// The largest identifier.
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HarvestArg {
    Exhaustive,
    Honest,
}

#[derive(Debug, Clone, Args)]
pub struct SchemeArgs {
    /// Registered scheme name, e.g. `amos-global` or `universal:odd-cycle`.
    #[arg(long)]
    scheme: String,
    /// Identifier bound `M`; derived from the instance when absent.
    #[arg(long)]
    id_bound: Option<u64>,
    /// Edge-weight bound; derived from the instance when absent.
    #[arg(long)]
    weight_bound: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    #[arg(long, default_value = "cycles")]
    family: String,
    /// Node counts as `a..b`, `a..=b`, `a,b,c` or `a`.
    #[arg(long, default_value = "3..=6")]
    n: String,
    #[arg(long, value_enum, default_value_t = InputsArg::Selections)]
    inputs: InputsArg,
    /// Random graphs per size for `--inputs weighted`.
    #[arg(long, default_value_t = 10)]
    count: usize,
}

#[derive(Debug, Clone, Args)]
pub struct AttackArgs {
    #[arg(long)]
    scheme: String,
    /// Ordinary blocks.
    #[arg(long, default_value_t = 2)]
    b: usize,
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Local certificate width to harvest.
    #[arg(long, default_value_t = 0)]
    f: usize,
    /// Global certificate length to harvest.
    #[arg(long, default_value_t = 0)]
    g: usize,
    #[arg(long, value_enum, default_value_t = HarvestArg::Exhaustive)]
    harvest: HarvestArg,
    /// Permutations sampled when `b` is too large to enumerate.
    #[arg(long, default_value_t = 5000)]
    samples: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verifier on a graph with a given proof.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        proof: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, value_enum, default_value_t = Rule::Strict)]
        rule: Rule,
    },
    /// Write the honest proof for a yes-instance.
    Prove {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Honest proofs on every yes-instance of a corpus.
    Completeness {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Certificate search on every no-instance of a corpus.
    Soundness {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Random certificates tried when the space is too large for exact search.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Whether any certificate within the budget makes every node accept.
    Decide {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Achieved certificate sizes and the price of locality.
    PolReport {
        #[arg(long)]
        lang: String,
        #[arg(long, default_value = "4..=16")]
        n: String,
        #[arg(long, value_enum, default_value_t = BoundArg::Pow2)]
        bound: BoundArg,
    },
    /// Block-permutation attack on a scheme for alos, leader or st.
    Fooling(AttackArgs),
    /// Block-permutation attack restricted to two-colored permutations.
    OddFooling(AttackArgs),
    /// Coloring extraction from bipartiteness certificates on block cycles.
    BipartiteExtract {
        /// `bip-table`, or `bip-local` lifted to a global certificate.
        #[arg(long, default_value = "bip-table")]
        scheme: String,
        /// Number of blocks.
        #[arg(long, default_value_t = 6)]
        blocks: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// Longest block cycle considered; all blocks when absent.
        #[arg(long)]
        max_blocks: Option<usize>,
    },
    /// Truth tables of a function, its compiled scheme and the extracted protocol.
    CcSim {
        #[arg(long, default_value = "neq")]
        function: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        t: usize,
    },
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(w) = cli.common.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli.command, &cli.common) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
