//! Command-line front end for tourcast: instance directories, run
//! manifests, and the `solve`, `check`, `sweep`, `gen` and `oracle`
//! subcommands.

pub mod commands;
pub mod error;
pub mod instance_dir;
pub mod manifest;
pub mod sweep;

pub use error::{CliError, CliResult};
pub use manifest::{Overrides, RunConfig, RunManifest};
