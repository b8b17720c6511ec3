//! Run manifests written next to every output file.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliResult;

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// Full argument vector of the invocation.
    pub args: Vec<String>,
    /// Resolved parameters, after presets, file and flags.
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub tool_version: &'static str,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_s: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Self {
            command: command.into(),
            args: std::env::args().collect(),
            config,
            seed: None,
            tool_version: env!("CARGO_PKG_VERSION"),
            outputs: Vec::new(),
            wall_clock_s: 0.0,
        }
    }

    /// `<output>.manifest.json`.
    pub fn path_for(output: &Path) -> PathBuf {
        let mut s = output.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    pub fn write_beside(&self, output: &Path) -> CliResult<PathBuf> {
        let path = Self::path_for(output);
        std::fs::write(&path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(path)
    }
}
