//! The machine-readable run report written by `--json`.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::format::FORMAT_VERSION;

/// Everything but `wall_time_s` is a function of the command line and the
/// input files.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: u32,
    pub tool_version: String,
    pub command: Vec<String>,
    /// Input name to SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub exit_code: u8,
    pub output: Value,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn new(command: Vec<String>, inputs: BTreeMap<String, String>, exit_code: u8, output: Value, wall_time_s: f64) -> Self {
        RunReport {
            version: FORMAT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command,
            inputs,
            exit_code,
            output,
            wall_time_s,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}
