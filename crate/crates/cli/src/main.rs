//! `planar-dirac`: algebra verification, spectra, degeneracy checks and
//! oracle comparisons for the planar circular Dirac equation.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use planar_dirac::degeneracy::Mode;
use planar_dirac::Error;

#[derive(Parser, Debug)]
#[command(name = "planar-dirac", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration. `verify-algebra` falls back to defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Seed for random test states; recorded in every output.
    #[arg(long, global = true, value_name = "N", default_value_t = 1)]
    seed: u64,

    /// Write ρ, g, f for every state found by `spectrum`.
    #[arg(long, global = true)]
    dump_wavefunctions: bool,

    /// Override the pass tolerance of the command.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,

    /// Override the number of radial grid points.
    #[arg(long, global = true, value_name = "N")]
    grid_points: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Check every relation of the claims table on random states.
    VerifyAlgebra,
    /// Bound-state energies of each configured sector.
    Spectrum,
    /// Pair partner sectors and compare their energies.
    Degeneracy {
        #[arg(long, value_enum)]
        mode: ModeArg,
    },
    /// Compare shooting energies with the finite-difference oracle.
    OracleCompare,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ModeArg {
    Spin,
    Pseudospin,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Spin => Mode::Spin,
            ModeArg::Pseudospin => Mode::Pseudospin,
        }
    }
}

/// Why a command stopped short of a verdict.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Io(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) | Failure::Usage(_) => 2,
            Failure::Core(e) => match e {
                Error::SymmetryViolated(_) => 1,
                Error::Config(_)
                | Error::BadGrid(_)
                | Error::BadPotential(_)
                | Error::InconsistentSector { .. }
                | Error::NotHalfOdd(_)
                | Error::BadAngularGrid(_)
                | Error::Aliasing { .. }
                | Error::OracleTooLarge { .. } => 2,
                _ => 3,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(msg) | Failure::Usage(msg) => f.write_str(msg),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let options = commands::Options {
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        dump_wavefunctions: cli.dump_wavefunctions,
        tol: cli.tol,
        grid_points: cli.grid_points,
    };
    let outcome = match cli.command {
        Command::VerifyAlgebra => commands::verify_algebra(&options),
        Command::Spectrum => commands::spectrum(&options),
        Command::Degeneracy { mode } => commands::degeneracy(&options, mode.into()),
        Command::OracleCompare => commands::oracle_compare(&options),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
