//! File formats and command pipelines for the `fracsl` binary.
//!
//! - [`spec_file`]: flat `key = value` problem descriptions
//! - [`table`]: CSV tables of sampled functions
//! - [`json`]: deterministic JSON output
//! - [`commands`]: one pipeline per subcommand

pub mod commands;
mod error;
pub mod json;
pub mod spec_file;
pub mod table;

pub use error::{CliError, Result};
