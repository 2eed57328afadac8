//! File formats, checkpoints and the command-line driver for `tagtopic-core`.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod error;
pub mod formats;

pub use error::{CliError, Result};
