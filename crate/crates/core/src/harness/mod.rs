//! Sweep configuration, execution, CSV persistence, verification suites and
//! the command line.

pub mod cli;
pub mod config;
pub mod csv_io;
pub mod sweep;
pub mod verify;

pub use cli::cli_dispatch;
pub use config::{CandidateShotsMode, SweepConfig};
pub use csv_io::{aggregate, read_trials, read_trials_file, write_aggregate, write_trials, AggregateRow, TrialRow};
pub use sweep::{run_indexed_trial, run_sweep};
pub use verify::{run_suite, CheckResult, Suite};
