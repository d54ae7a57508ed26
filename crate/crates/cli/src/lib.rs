//! Front end for `accelphase`: configuration, the `evolve`, `phase`,
//! `diff`, `sweep` and `check` workflows, and their file outputs.

pub mod check;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;

pub use check::{cmd_check, CheckLine, CheckReport};
pub use commands::{cmd_diff, cmd_evolve, cmd_phase, DiffReport, EvolveReport, PhaseReport};
pub use config::{Command, RunConfig};
pub use error::{CliError, Result};
pub use sweep::{cmd_sweep, SweepReport, SweepRow};
