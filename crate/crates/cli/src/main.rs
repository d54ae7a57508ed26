use std::path::PathBuf;
use std::process::ExitCode;

use accelphase_cli::commands::write_phase_csv;
use accelphase_cli::config::{self, Command};
use accelphase_cli::{cmd_check, cmd_diff, cmd_evolve, cmd_phase, cmd_sweep, CliError};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

/// Geometric phase of a uniformly accelerated two-level atom.
#[derive(Parser)]
#[command(name = "accelphase", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Write the density-matrix trajectory as CSV.
    Evolve,
    /// Report the geometric phase by each method.
    Phase,
    /// Report the accelerated-minus-inertial phase and the lab-frame cycle time.
    Diff,
    /// Tabulate phases over a (theta, abar) grid.
    Sweep,
    /// Run the oracle suite.
    Check,
}

// Values stay strings so the config layer can report every bad field.
#[derive(Args)]
struct Flags {
    /// key=value config file; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Initial polar angle in radians (accepts pi/2 style).
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Dimensionless acceleration a/(c omega0).
    #[arg(long, global = true, allow_hyphen_values = true)]
    abar: Option<String>,
    /// Transition frequency in rad/s.
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega0: Option<String>,
    /// Proper acceleration in m/s^2 (needs --omega0).
    #[arg(long, global = true, allow_hyphen_values = true)]
    accel: Option<String>,
    /// Spontaneous emission rate over omega0.
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma_ratio: Option<String>,
    /// Relative shift of the effective transition frequency.
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega_shift: Option<String>,
    /// Number of quasi-cycles.
    #[arg(long, global = true)]
    periods: Option<String>,
    /// Time steps over the whole horizon.
    #[arg(long, global = true)]
    steps: Option<String>,
    /// Kinematic-phase samples per quasi-cycle.
    #[arg(long, global = true)]
    samples: Option<String>,
    /// all | quadrature | closed_form | first_order | kinematic
    #[arg(long, global = true)]
    method: Option<String>,
    /// Add RK4 columns to the evolve output.
    #[arg(long, global = true)]
    oracle: bool,
    /// Reduced check grid.
    #[arg(long, global = true)]
    quick: bool,
    /// Offset added to the rate A on the RK4 side of check.
    #[arg(long, global = true, allow_hyphen_values = true)]
    perturb: Option<String>,
    /// Output file.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<String>,
    /// Sweep: gnuplot script path.
    #[arg(long, global = true, value_name = "PATH")]
    plot: Option<String>,
    /// Sweep: number of theta points over [0, pi].
    #[arg(long, global = true)]
    theta_points: Option<String>,
    /// Sweep: comma-separated abar values.
    #[arg(long, global = true, allow_hyphen_values = true)]
    abar_values: Option<String>,
}

impl Flags {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        let pairs = [
            ("theta", &self.theta),
            ("abar", &self.abar),
            ("omega0", &self.omega0),
            ("accel", &self.accel),
            ("gamma_ratio", &self.gamma_ratio),
            ("omega_shift", &self.omega_shift),
            ("periods", &self.periods),
            ("steps", &self.steps),
            ("samples", &self.samples),
            ("method", &self.method),
            ("perturb", &self.perturb),
            ("out", &self.out),
            ("plot", &self.plot),
            ("theta_points", &self.theta_points),
            ("abar_values", &self.abar_values),
        ];
        for (k, val) in pairs {
            if let Some(s) = val {
                v.push((k, s.clone()));
            }
        }
        if self.oracle {
            v.push(("oracle", "true".into()));
        }
        if self.quick {
            v.push(("quick", "true".into()));
        }
        v
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let command = match cli.command {
        Cmd::Evolve => Command::Evolve,
        Cmd::Phase => Command::Phase,
        Cmd::Diff => Command::Diff,
        Cmd::Sweep => Command::Sweep,
        Cmd::Check => Command::Check,
    };
    let cfg = config::load(cli.flags.config.as_deref(), &cli.flags.overrides(), command)?;
    match command {
        Command::Evolve => println!("{}", cmd_evolve(&cfg)?),
        Command::Phase => {
            let report = cmd_phase(&cfg)?;
            if let Some(path) = &cfg.out {
                write_phase_csv(&report, path)?;
            }
            println!("{report}");
        }
        Command::Diff => println!("{}", cmd_diff(&cfg)?),
        Command::Sweep => println!("{}", cmd_sweep(&cfg)?),
        Command::Check => {
            let report = cmd_check(&cfg)?;
            println!("{report}");
            let failed = report.failures();
            if failed > 0 {
                return Err(CliError::CheckFailed { failed });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
