//! `netwit`: GME certification for pair-entangled networks.

mod commands;
mod manifest;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "netwit", version, about = "Sub-symmetric witnesses for quantum networks")]
pub struct Cli {
    /// Worker threads for sweeps and sampling (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cut space, cactus structure and topology comparison.
    Graph(GraphArgs),
    /// Evaluate an analytic witness on a network state.
    Witness(WitnessArgs),
    /// Solve the witness linear program.
    Optimize(OptimizeArgs),
    /// Eigenvalue certification of full decomposability.
    Verify(VerifyArgs),
    /// Simulated stabilizer-measurement estimation.
    Sample(SampleArgs),
    /// Random-graph sweeps and family scans.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    /// Graph file (JSON or edge list).
    pub path: String,
    /// Second graph on the same edge indices.
    #[arg(long)]
    pub compare: Option<String>,
}

#[derive(Args, Debug)]
pub struct StateArgs {
    /// JSON state file.
    #[arg(long, conflicts_with_all = ["p"])]
    pub state: Option<String>,
    /// Local dimension, with `--p`.
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Uniform visibility of every edge.
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    ESsw,
    BgSsw,
    Triangle,
    Fidelity,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    pub graph: String,
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_enum)]
    pub family: FamilyName,
    /// Include coefficients and cut certificates in the output.
    #[arg(long)]
    pub emit_witness: bool,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    pub graph: String,
    #[command(flatten)]
    pub state: StateArgs,
    /// Symmetry-reduced program for cactus networks.
    #[arg(long)]
    pub reduced: bool,
    /// Normalized detection program instead of the negativity bound.
    #[arg(long, conflicts_with = "reduced")]
    pub feasibility: bool,
    /// Write the program in MPS format.
    #[arg(long)]
    pub dump_mps: Option<String>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub graph: String,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Witness JSON, alone or as produced by `optimize` or `witness --emit-witness`.
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    pub witness: Option<String>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    /// Also require `Q_K ⪯ I`.
    #[arg(long)]
    pub require_upper: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SampleTarget {
    Fidelity,
    Witness,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value = "witness")]
    pub target: SampleTarget,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long)]
    pub p: f64,
    /// Number of edges (witness target).
    #[arg(long, default_value_t = 1)]
    pub edges: usize,
    #[arg(long)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum ExperimentCommand {
    /// Thresholds over random connected graphs.
    Sweep(SweepArgs),
    /// Thresholds along a graph family.
    Scan(ScanArgs),
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Vertex counts: `5..15` (inclusive) or `5,7,9`.
    #[arg(long)]
    pub n: String,
    /// Comma-separated edge densities in (0, 1].
    #[arg(long)]
    pub density: String,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; without it the CSV goes to stdout.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScanFamily {
    Complete,
    Circulant,
    Path,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub family: ScanFamily,
    /// Degree fraction for circulant graphs.
    #[arg(long, default_value_t = 0.75)]
    pub c: f64,
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
}

fn main() -> ExitCode {
    let mut argv: Vec<String> = std::env::args().collect();
    if let Some(first) = argv.first_mut() {
        *first = "netwit".to_string();
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {err}");
            return ExitCode::from(1);
        }
    }
    match commands::run(cli.command, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::VerificationFailed) => ExitCode::from(4),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
