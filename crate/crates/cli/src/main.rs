mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tacit_core::TcError;

#[derive(Parser)]
#[command(name = "tacit", version, about = "Classical and quantum values of tacit-coordination problems")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive search over deterministic strategies.
    Classical {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Largest number of strategies to enumerate.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Numerical lower bound on the quantum value.
    Quantum {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Best utility when each party receives its particle with probability eta.
    Lossy {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// One efficiency for all parties, or one per party (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        eta: Vec<f64>,
    },
    /// Smallest efficiency that keeps a quantum advantage.
    Threshold {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Smallest advantage counted as a gap.
        #[arg(long, default_value_t = 1e-7)]
        epsilon: f64,
    },
    /// Hedge-or-not grid scan written as CSV (`p,beta,value`).
    Scan {
        #[arg(long, value_enum, default_value_t = QuantityArg::Gap)]
        quantity: QuantityArg,
        /// START:STOP:STEP
        #[arg(long, default_value = "0:1:0.1")]
        p_range: String,
        /// START:STOP:STEP
        #[arg(long, default_value = "0:1:0.1")]
        beta_range: String,
        /// Noise weight for `noisy-gap` scans.
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 1e-7)]
        epsilon: f64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Efficiencies, heralding rates and multiplexing for a photonic link.
    Linkbudget {
        /// fiber, vacuum_guide, waveguide or free_space.
        #[arg(long, default_value = "fiber")]
        medium: String,
        /// Medium carrying the herald signal.
        #[arg(long, default_value = "free_space")]
        herald: String,
        /// Separation between the parties in km.
        #[arg(long)]
        distance: f64,
        /// Source-to-party length in km (defaults to half the separation).
        #[arg(long)]
        arm_length: Option<f64>,
        #[arg(long, default_value_t = 1)]
        multiplicity: u64,
        /// Target entanglement rate in Hz.
        #[arg(long)]
        target_rate: Option<f64>,
        /// Probability that the heralding measurement succeeds.
        #[arg(long, default_value_t = 0.5)]
        projection: f64,
        /// Efficiency target for the maximum arm length.
        #[arg(long, default_value_t = 2.0 / 3.0)]
        eta_target: f64,
    },
}

#[derive(Args, Clone)]
pub struct ProblemArgs {
    /// Problem document (JSON).
    file: Option<PathBuf>,
    /// Built-in problem instead of a file.
    #[arg(long, value_enum, conflicts_with = "file")]
    problem: Option<BuiltIn>,
    #[arg(long, requires = "problem")]
    p: Option<f64>,
    #[arg(long, requires = "problem")]
    beta: Option<f64>,
    /// Swap the CHSH winning condition.
    #[arg(long, requires = "problem")]
    anti: bool,
}

#[derive(Args, Clone)]
pub struct SolverArgs {
    /// Local dimension per party (one value applies to all).
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = MethodArg::Grid)]
    method: MethodArg,
    /// Grid points per continuous axis.
    #[arg(long)]
    grid_size: Option<usize>,
    #[arg(long, env = "TACIT_SEED")]
    seed: Option<u64>,
    /// Cap on grid points times discrete assignments.
    #[arg(long)]
    budget: Option<u128>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum BuiltIn {
    HedgeOrNot,
    Chsh,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Grid,
    Cmaes,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum QuantityArg {
    Gap,
    EtaStar,
    Robustness,
    NoisyGap,
}

/// Failure with its exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<TcError> for Failure {
    fn from(e: TcError) -> Self {
        let code = match e {
            TcError::Budget { .. } => 3,
            TcError::MissingState | TcError::NonHermitian(_) | TcError::Numerical(_) => 4,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self { code: 2, message: e.to_string() }
    }
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not size the worker pool: {e}");
        }
    }
    match commands::run(cli.command, cli.output.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
