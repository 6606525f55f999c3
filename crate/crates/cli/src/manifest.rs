use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::TOOL_VERSION;

/// One per run, written next to the run's outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// The parsed flags of the subcommand, verbatim.
    pub parameters: serde_json::Value,
    pub tool_version: String,
    pub wall_time_secs: f64,
    pub outputs: Vec<PathBuf>,
    pub passed: bool,
    pub summary: Vec<String>,
}

impl RunManifest {
    pub fn new<P: Serialize>(
        command: &str,
        parameters: &P,
        wall_time: Duration,
        outputs: Vec<PathBuf>,
        passed: bool,
        summary: Vec<String>,
    ) -> anyhow::Result<Self> {
        Ok(RunManifest {
            command: command.to_string(),
            parameters: serde_json::to_value(parameters)?,
            tool_version: TOOL_VERSION.to_string(),
            wall_time_secs: wall_time.as_secs_f64(),
            outputs,
            passed,
            summary,
        })
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }
}

/// `<file>.manifest.json` for single-file outputs.
pub fn beside(file: &Path) -> PathBuf {
    let mut name = file.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
