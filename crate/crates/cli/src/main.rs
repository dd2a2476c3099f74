//! `credal`: coherence checks, extreme points, normal fans and natural
//! extensions for credal-set models.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    /// The model failed a property, e.g. it is not coherent.
    PropertyFailure = 1,
    /// Bad arguments or input files.
    InputError = 2,
}

#[derive(Parser, Debug)]
#[command(name = "credal", version, about = "Exact normal fans of credal sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    /// chains for 2-monotone lower probabilities, pri for interval models,
    /// walk otherwise
    Auto,
    /// generic MESC graph walk
    Walk,
    /// maximal chains of a 2-monotone lower probability
    Chains,
    /// replacement rules of a probability-interval model
    Pri,
    /// brute-force vertex enumeration (small models only)
    Oracle,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Common {
    /// Model file (JSON)
    #[arg(long)]
    model: PathBuf,
    /// Write a JSON run report here
    #[arg(long)]
    report: Option<PathBuf>,
    /// Render rationals as rounded 12-digit decimals (approximate)
    #[arg(long)]
    decimal: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coherence and, where it applies, 2-monotonicity
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Extreme points of the credal set as CSV
    Vertices {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Engine::Auto)]
        engine: Engine,
        /// CSV destination; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summary of the MESC graph
    Fan {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Engine::Auto)]
        engine: Engine,
        /// Also write the graph in DOT format
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Also write the graph as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The MESC graph in DOT format
    Graph {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Engine::Auto)]
        engine: Engine,
        /// DOT destination; stdout when absent
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Also write the graph as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Natural extension of a gamble
    Natex {
        #[command(flatten)]
        common: Common,
        /// Gamble file: JSON object keyed by outcome, or array
        #[arg(long)]
        gamble: PathBuf,
        /// Cross-check against the brute-force vertex scan
        #[arg(long)]
        verify: bool,
    },
    /// Range of the number of MESCs of an interval model on N outcomes
    Bounds {
        n: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                Status::InputError as u8
            } else {
                0
            });
        }
    };
    let status = match cli.command {
        Command::Check { common } => commands::check(&common),
        Command::Vertices {
            common,
            engine,
            out,
        } => commands::vertices(&common, engine, out.as_deref()),
        Command::Fan {
            common,
            engine,
            dot,
            out,
        } => commands::fan(&common, engine, dot.as_deref(), out.as_deref(), false),
        Command::Graph {
            common,
            engine,
            dot,
            out,
        } => commands::fan(&common, engine, dot.as_deref(), out.as_deref(), true),
        Command::Natex {
            common,
            gamble,
            verify,
        } => commands::natex(&common, &gamble, verify),
        Command::Bounds { n, report } => commands::bounds(n, report.as_deref()),
    };
    ExitCode::from(status as u8)
}
