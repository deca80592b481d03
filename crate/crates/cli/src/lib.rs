//! Library side of the `pianorbm` command: checkpoints, run configuration,
//! dataset manifests, input loading, the benchmark harness and the
//! subcommands themselves.

pub mod bench;
pub mod checkpoint;
pub mod commands;
pub mod config;
mod error;
pub mod inputs;
pub mod manifest;

pub use error::{CliError, CliResult};
