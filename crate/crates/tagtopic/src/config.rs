//! Optional TOML run configuration. Command-line flags override file values,
//! which override built-in defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::formats::read_text;

/// Keys accepted in a config file. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<String>,
    pub topics: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub iters: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub order: Option<usize>,
    /// `0` disables the cap.
    pub tuple_cap: Option<usize>,
    pub warmup: Option<usize>,
    pub neighbors: Option<String>,
    /// Top-k tags per word written to `credit.txt` after TTM training.
    pub credit_top_k: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => Self::parse(&read_text(p)?).map_err(|e| CliError::Config(format!("{}: {e}", p.display()))),
        }
    }

    pub fn parse(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}
