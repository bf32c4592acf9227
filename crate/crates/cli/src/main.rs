//! `nhyp`: exact hyperbolicity constants, tight spans and orthoplex
//! witnesses for finite metric spaces.
//!
//! Exit codes: 0 success, 1 input error, 2 metric violations, 3 resource
//! guard exceeded.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::Format;

#[derive(Parser, Debug)]
#[command(name = "nhyp", version, about = "Exact (n, delta)-hyperbolicity and tight spans of finite metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Accept floating-point JSON entries, replacing each by its best
    /// rational approximation.
    #[arg(long, global = true)]
    pub rationalize: bool,
    /// Denominator bound used by --rationalize.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub denominator_bound: u64,
    #[command(flatten)]
    pub guards: Guards,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Guards {
    /// Largest accepted input space.
    #[arg(long, global = true, env = "NHYP_MAX_POINTS", default_value_t = 64)]
    pub max_points: usize,
    /// Largest accepted n.
    #[arg(long, global = true, env = "NHYP_MAX_N", default_value_t = 4)]
    pub max_n: usize,
    /// Largest number of families (or paired subsets) to enumerate.
    #[arg(long, global = true, env = "NHYP_MAX_FAMILIES", default_value_t = 5_000_000)]
    pub max_families: u128,
    /// Largest space whose tight span is enumerated.
    #[arg(long, global = true, env = "NHYP_MAX_TIGHTSPAN_POINTS", default_value_t = 6)]
    pub max_tightspan_points: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the metric axioms.
    Validate { file: PathBuf },
    /// Least delta for which the space is (n, delta)-hyperbolic.
    Delta {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = EngineArg::Assignment)]
        engine: EngineArg,
    },
    /// Gromov's four-point constant.
    Gromov { file: PathBuf },
    /// Vertices, cells and dimension of the tight span.
    Tightspan {
        file: PathBuf,
        /// Include every cell in the report.
        #[arg(long)]
        cells: bool,
        /// Write the complex as JSON.
        #[arg(long)]
        export: Option<PathBuf>,
        /// Write the cells' equality graphs as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Largest orthoplex scale over paired subsets, with a witness.
    Orthoplex {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Generate a space.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Output file (`.csv` for CSV, JSON otherwise); stdout if absent.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// l-infinity product of two spaces.
    Product {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum GenKind {
    /// Graph metric of an m-cycle.
    Cycle { m: usize },
    /// Leaf metric of a random weighted tree.
    Tree {
        #[arg(long)]
        leaves: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Shortest-path metric of a random connected graph.
    Graph {
        #[arg(long)]
        points: usize,
        #[arg(long, default_value_t = 0.4)]
        edge_probability: f64,
        #[arg(long, default_value_t = 5)]
        max_weight: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lattice points under the sup or Euclidean norm.
    Grid {
        #[arg(long, value_enum, default_value_t = SpaceArg::Linf)]
        space: SpaceArg,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        side: usize,
        /// Exact scale factor, e.g. `10` or `1/3`.
        #[arg(long, default_value = "1")]
        scale: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Full,
    Distinct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Brute,
    Assignment,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    Linf,
    L2,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot set up {t} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            if let Some(out) = failure.stdout() {
                print!("{out}");
            }
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
