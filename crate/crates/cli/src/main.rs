//! `qsl`: evaluate speed-limit bounds, emit curve data, trace evolutions,
//! run the case studies and the randomized bound verifier.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsl_core::cases::CnotVariant;
use qsl_core::harness::Units;
use qsl_core::QslError;

#[derive(Parser)]
#[command(name = "qsl", version, about = "Quantum speed limit bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every bound at one angle.
    Bounds(BoundsArgs),
    /// Write the dimensionless bounds over a cos(theta) grid as CSV.
    Curve {
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the overlap trajectory of a system file with bound saturation ratios.
    Evolve {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Gate and search case studies.
    Case {
        #[command(subcommand)]
        case: CaseCommand,
        #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
        format: Format,
    },
    /// Check every bound against exact evolution of random systems.
    Verify {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        dim_max: usize,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, allow_negative_numbers = true)]
    theta: f64,
    #[arg(long, allow_negative_numbers = true, requires_all = ["spread", "emin"], conflicts_with = "system")]
    mean: Option<f64>,
    #[arg(long, requires = "mean")]
    spread: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "mean")]
    emin: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "mean")]
    emax: Option<f64>,
    #[arg(long, required_unless_present = "mean")]
    system: Option<PathBuf>,
    /// Actual evolution time (hbar units), for the saturation ratio.
    #[arg(long)]
    actual_time: Option<f64>,
    #[arg(long, default_value = "hbar", value_parser = parse_units)]
    units: Units,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum CaseCommand {
    /// Rotation of |0> to (|0> + |1>)/sqrt(2).
    Hadamard {
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        delta: f64,
    },
    /// CNOT from an intrinsic two-qubit Hamiltonian.
    Cnot {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value = "A", value_parser = parse_variant)]
        variant: CnotVariant,
        /// Also replace the Hadamard steps of variant A by pulses of this strength.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Minimal-time budget of Grover search.
    Grover {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1.0)]
        spread: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

fn parse_units(s: &str) -> Result<Units, String> {
    s.parse().map_err(|e: QslError| e.to_string())
}

fn parse_variant(s: &str) -> Result<CnotVariant, String> {
    s.parse().map_err(|e: QslError| e.to_string())
}

/// Failure modes with their exit codes.
enum Failure {
    Violations(usize),
    Usage(String),
    Core(QslError),
}

impl From<QslError> for Failure {
    fn from(e: QslError) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Violations(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Core(e) if e.is_file_error() => 3,
            Failure::Core(_) => 2,
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("QSL_THREADS") else {
        return Ok(());
    };
    let threads = value
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Failure::Usage(format!(
                "QSL_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Bounds(args) => commands::bounds(args),
        Command::Curve { points, out } => commands::curve(points, &out),
        Command::Evolve {
            system,
            t_max,
            samples,
            out,
        } => commands::evolve(&system, t_max, samples, &out),
        Command::Case { case, format } => commands::case(case, format),
        Command::Verify {
            trials,
            dim_max,
            samples,
            seed,
            out,
        } => commands::verify(trials, dim_max, samples, seed, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Violations(n) => eprintln!("qsl: {n} bound violations"),
                Failure::Usage(message) => eprintln!("qsl: {message}"),
                Failure::Core(e) => eprintln!("qsl: {e}"),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::Violations(3).exit_code(), 1);
        assert_eq!(Failure::Usage(String::new()).exit_code(), 2);
        assert_eq!(Failure::Core(QslError::ZeroSpread).exit_code(), 2);
        let parse = QslError::Parse {
            path: Path::new("x").into(),
            message: String::new(),
        };
        assert_eq!(Failure::Core(parse).exit_code(), 3);
    }

    #[test]
    fn bounds_sources_are_exclusive() {
        let manual = [
            "qsl", "bounds", "--theta", "1", "--mean", "1", "--spread", "1", "--emin", "0",
        ];
        assert!(Cli::try_parse_from(manual).is_ok());
        assert!(
            Cli::try_parse_from(["qsl", "bounds", "--theta", "1", "--system", "f.json"]).is_ok()
        );
        assert!(Cli::try_parse_from(["qsl", "bounds", "--theta", "1", "--mean", "1"]).is_err());
        let both = [
            "qsl", "bounds", "--theta", "1", "--mean", "1", "--spread", "1", "--emin", "0",
            "--system", "f",
        ];
        assert!(Cli::try_parse_from(both).is_err());
    }

    #[test]
    fn negative_energies_parse() {
        let args = [
            "qsl", "bounds", "--theta", "1", "--mean", "-1", "--spread", "1", "--emin", "-2",
            "--emax", "-0.5",
        ];
        assert!(Cli::try_parse_from(args).is_ok());
    }
}
