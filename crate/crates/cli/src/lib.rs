//! Library half of the `subsynth` command: configuration, result documents and subcommands.

pub mod commands;
pub mod config;
pub mod document;
pub mod error;

pub use commands::{cmd_eval, cmd_pattern, cmd_sweep, cmd_synth, Axis};
pub use config::{build_config, PatternArgs, RunConfig, Solver, SolverArgs};
pub use document::ResultDocument;
pub use error::{exit, CliError};
