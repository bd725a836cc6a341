//! `bramsey`: command-line front end for the bipartite Ramsey toolkit.
//!
//! Exit status: 0 success, 1 verified negative, 2 error, 3 budget exhausted
//! or inconclusive.

mod commands;
mod output;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bramsey_core::regularity::{parse_ratio, Ratio};

#[derive(Parser, Debug)]
#[command(name = "bramsey", version, about = "Bipartite Ramsey numbers of even cycles: constructions, certificates, exact search")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Each can also be set through the
/// environment variable shown in `--help`.
#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0, env = "BRAMSEY_SEED")]
    pub seed: u64,
    /// Worker threads; 1 runs sequentially, 0 uses every core.
    #[arg(long, global = true, default_value_t = 1, env = "BRAMSEY_JOBS")]
    pub jobs: usize,
    /// Wall-clock budget for exhaustive searches, in milliseconds.
    #[arg(long, global = true, env = "BRAMSEY_BUDGET_MS")]
    pub budget_ms: Option<u64>,
    /// Node budget for exhaustive searches; reproducible, unlike `--budget-ms`.
    #[arg(long, global = true, env = "BRAMSEY_BUDGET_NODES")]
    pub budget_nodes: Option<u64>,
    /// Write the artifact to this file (a directory for `report`).
    #[arg(short, long, global = true, env = "BRAMSEY_OUTPUT")]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json, env = "BRAMSEY_FORMAT")]
    pub format: Format,
    /// Include wall-clock timings in artifacts (makes them non-reproducible).
    #[arg(long, global = true, env = "BRAMSEY_TIMING")]
    pub timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate the explicit extremal colorings.
    #[command(subcommand)]
    Construct(Construct),
    /// Find or verify a monochromatic cycle of a given length.
    #[command(subcommand)]
    Cycle(CycleCmd),
    /// Connected matchings per color.
    #[command(subcommand)]
    Matching(MatchingCmd),
    /// Structure certificates for graphs without large matchings.
    #[command(subcommand)]
    Decomp(DecompCmd),
    /// Pair regularity and reduced graphs.
    #[command(subcommand)]
    Regularity(RegularityCmd),
    /// Long monochromatic cycles through the reduced-graph pipeline.
    #[command(subcommand)]
    Pipeline(PipelineCmd),
    /// Exhaustive bipartite Ramsey search.
    #[command(subcommand)]
    Ramsey(RamseyCmd),
    /// Aggregate a directory of JSON artifacts into tables.
    Report {
        dir: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum Construct {
    /// Good coloring of K_{N,N} with N = sum n_i - r.
    LowerBound {
        /// Half cycle lengths n_i (each at least 2).
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<usize>,
    },
    /// The 4n x 4n two-colored graph with minimum degree 3n.
    HTilde {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum CycleCmd {
    Find {
        #[arg(long)]
        color: u8,
        /// Number of edges of the cycle.
        #[arg(long)]
        length: usize,
        graph: PathBuf,
    },
    /// Check a cycle certificate (or a `cycle_search` artifact) against a graph.
    Verify {
        #[arg(long)]
        certificate: PathBuf,
        graph: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum MatchingCmd {
    /// Largest connected matching of every color class.
    Best { graph: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum DecompCmd {
    Tutte {
        #[arg(long)]
        color: u8,
        /// Defaults to twice the maximum matching size plus one.
        #[arg(long)]
        alpha: Option<usize>,
        graph: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Witness,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Majority,
    Degree,
}

#[derive(Subcommand, Debug)]
pub enum RegularityCmd {
    /// Is the pair (A, B) eps-regular in one color?
    Check {
        #[arg(long)]
        color: u8,
        /// X vertex indices.
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<usize>,
        /// Y vertex indices.
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<usize>,
        #[arg(long, value_parser = ratio_arg)]
        eps: Ratio,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, default_value_t = 8)]
        probes: usize,
        graph: PathBuf,
    },
    /// Reduced graph of a 2-colored graph over a cluster partition.
    Reduce {
        /// Partition file; a uniform partition with `--clusters` otherwise.
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        clusters: usize,
        #[arg(long, value_enum, default_value_t = RuleArg::Majority)]
        rule: RuleArg,
        /// `eps` for the majority rule, `d` for the degree rule.
        #[arg(long, value_parser = ratio_arg, default_value = "1/200")]
        param: Ratio,
        graph: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum PipelineCmd {
    Run(PipelineRun),
}

#[derive(Args, Debug)]
pub struct PipelineRun {
    #[arg(long, value_delimiter = ',', value_parser = ratio_arg, default_value = "1,1")]
    pub alpha: Vec<Ratio>,
    #[arg(long, value_parser = ratio_arg)]
    pub xi: Ratio,
    #[arg(long, default_value_t = 6)]
    pub clusters: usize,
    #[arg(long, value_parser = ratio_arg)]
    pub eps: Option<Ratio>,
    #[arg(long, value_parser = ratio_arg)]
    pub beta: Option<Ratio>,
    /// Use this n instead of the largest one the host size allows.
    #[arg(long)]
    pub n: Option<usize>,
    /// Minimum-degree host instead of a complete one.
    #[arg(long)]
    pub min_degree: bool,
    /// Run on a seeded uniform random 2-coloring of K_{N,N}.
    #[arg(long, conflicts_with = "graph")]
    pub random: Option<usize>,
    #[arg(required_unless_present = "random")]
    pub graph: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum RamseyCmd {
    /// Does every coloring of K_{N,N} contain one of the forbidden cycles?
    Decide {
        #[arg(long = "N", alias = "side")]
        n: usize,
        /// Cycle lengths per color, e.g. 8,4.
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<usize>,
        /// Resume from a checkpoint written by an earlier run.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Where to write the checkpoint if the budget runs out.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Smallest N for which every coloring is hit.
    Value {
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
    },
}

fn ratio_arg(s: &str) -> Result<Ratio, String> {
    parse_ratio(s).map_err(|e| e.to_string())
}

/// Outcome classes mapped to exit codes.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Negative,
    Budget,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Negative => 1,
            Status::Budget => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
