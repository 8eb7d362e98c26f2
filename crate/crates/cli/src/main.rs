use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod unitary_spec;

use unitary_spec::UnitarySpec;

#[derive(Parser)]
#[command(
    name = "mcu-forge",
    version,
    about = "Linear-depth synthesis of multi-controlled single-qubit gates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build C^n U and write it as JSON or QASM.
    Decompose(DecomposeArgs),
    /// Check decompositions against the brute-force oracle.
    Verify(VerifyArgs),
    /// Depth and gate-count table over a range of control counts.
    Bench(BenchArgs),
    /// Run experiment a (C^n X) or b (C^n U after U^dagger) under depolarizing noise.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Qasm,
}

#[derive(Args)]
pub struct DecomposeArgs {
    /// Number of controls.
    #[arg(short)]
    pub n: usize,
    /// Target unitary: x, h, z, rx:θ, ry:θ, rz:θ, random:SEED or a JSON 2x2 matrix.
    #[arg(short, long = "unitary")]
    pub u: UnitarySpec,
    /// Rewrite controlled gates into CX and one-qubit gates.
    #[arg(long)]
    pub lower: bool,
    /// Output file; the circuit goes to stdout when omitted.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    #[arg(short, long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Largest control count to check.
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    /// Random targets per control count, on top of X.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Deliberately break the decomposition to exercise the failure path.
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    FaultySquareRoot,
}

#[derive(Args)]
pub struct BenchArgs {
    pub n_min: usize,
    pub n_max: usize,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    A,
    B,
}

#[derive(Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub which: Which,
    /// Control counts, comma separated.
    #[arg(short, required = true, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Depolarizing probabilities, comma separated.
    #[arg(short, default_value = "0", value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Shots per point; 50000 for a and 32000 for b when omitted.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Target for experiment b; defaults to random:SEED.
    #[arg(short, long = "unitary")]
    pub u: Option<UnitarySpec>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed")]
    Verification,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl From<mcu_forge_core::Error> for CliError {
    fn from(e: mcu_forge_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("MCU_FORGE_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "MCU_FORGE_THREADS must be a positive integer, got {value:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.command {
        Command::Decompose(a) => commands::decompose(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Bench(a) => commands::bench(&a),
        Command::Experiment(a) => commands::experiment(&a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Verification) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
