use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "wbnsl",
    version,
    about = "Ordering-based structure learning with weighted multiscores"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Best arc set for a fixed ordering (file order unless --ordering is given).
    Score {
        #[command(flatten)]
        common: Common,
    },
    /// Local search around an ordering in one of the distance neighborhoods.
    Ls {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        distance: LsDistance,
        /// Search radius.
        #[arg(short = 'r', long = "radius", default_value_t = 1)]
        radius: usize,
        /// Seed for the randomized solvers.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Colorings tried by `inv` [default: enough for success probability 1 - 1/e].
        #[arg(long)]
        repetitions: Option<usize>,
        /// Colorings tried per window by `invwin` [default: as for --repetitions].
        #[arg(long = "oracle-reps", conflicts_with = "exact")]
        oracle_reps: Option<usize>,
        /// Use one all-distinct coloring (exact, deterministic) for `inv` and `invwin`.
        #[arg(long)]
        exact: bool,
        /// Refuse `insert`/`swap` searches whose neighborhood exceeds this many orderings.
        #[arg(long = "work-bound", default_value_t = 10_000_000.0)]
        work_bound: f64,
        /// Run `insert`/`swap` searches even above --work-bound.
        #[arg(long)]
        force: bool,
    },
    /// Hill climbing with insertion and window moves from random restarts.
    Hillclimb {
        #[command(flatten)]
        common: Common,
        /// Window radius; windows span r+1 positions.
        #[arg(short = 'r', long = "radius", default_value_t = 3)]
        radius: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Moves must improve the score by more than this.
        #[arg(long, default_value_t = 1e-9)]
        epsilon: f64,
        /// Cap on accepted moves per restart, 0 for none.
        #[arg(long = "max-iterations", default_value_t = 0)]
        max_iterations: u64,
        /// Instance label in CSV rows [default: input file stem].
        #[arg(long = "instance-name")]
        instance_name: Option<String>,
    },
    /// Exhaustive optimum (tiny instances only).
    #[command(hide = true)]
    Brute {
        #[command(flatten)]
        common: Common,
        /// Restrict to orderings within this distance of the start ordering.
        #[arg(long, value_enum, requires = "radius")]
        distance: Option<BruteDistance>,
        #[arg(short = 'r', long = "radius")]
        radius: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Score file.
    pub input: PathBuf,
    /// Input lines carry a weight token after each score.
    #[arg(long)]
    pub weighted: bool,
    /// Inject an empty parent set with this score where one is missing.
    #[arg(long = "assume-empty-score", allow_negative_numbers = true)]
    pub assume_empty_score: Option<f64>,
    /// Start ordering: one variable name per line.
    #[arg(long)]
    pub ordering: Option<PathBuf>,
    /// Weight budget.
    #[arg(short = 'k', long = "budget", default_value_t = 0)]
    pub k: u64,
    /// Replace weights by parent set sizes, so -k bounds the number of arcs.
    #[arg(long = "bounded-arcs", conflicts_with = "indegree_limit")]
    pub bounded_arcs: bool,
    /// Replace weights by 1 for parent sets larger than this, 0 otherwise.
    #[arg(long = "indegree-limit", allow_negative_numbers = true)]
    pub indegree_limit: Option<i64>,
    /// Output format [default: csv for hillclimb, text otherwise].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads, 0 for all cores. Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LsDistance {
    Insert,
    Swap,
    Inv,
    Invwin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BruteDistance {
    Insert,
    Swap,
    Inv,
    Invwin,
    Win,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
    Csv,
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Score { common }
            | Command::Ls { common, .. }
            | Command::Hillclimb { common, .. }
            | Command::Brute { common, .. } => common,
        }
    }
}
