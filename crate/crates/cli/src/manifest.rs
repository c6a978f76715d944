//! Run manifests.
//!
//! Every subcommand writes a JSON manifest next to its outputs holding
//! the fully resolved parameters, the seed, and the output list, so any
//! run can be replayed bit for bit from the manifest alone.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shoal_core::SimParams;

use crate::output::CsvError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub subcommand: String,
    /// "I".."IV" for a pattern preset, "sweep-default", or "custom".
    pub preset: String,
    /// Absent for subcommands that consume no randomness (`metrics`).
    pub seed: Option<u64>,
    pub params: SimParams,
    pub duration_secs: f64,
    /// Files read, if any (the `metrics` trajectory input).
    pub inputs: Vec<String>,
    /// Files written, including this manifest.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<(), CsvError> {
        let io = |source| CsvError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent).map_err(io)?;
            }
        }
        fs::write(path, text).map_err(io)
    }

    pub fn read(path: &Path) -> Result<Self, CsvError> {
        let text = fs::read_to_string(path).map_err(|source| CsvError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CsvError::Format {
            path: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })
    }
}

/// Where the manifest for a given output lives: `manifest.json` inside a
/// directory, or `<stem>.manifest.json` beside a file.
pub fn manifest_path_for(output: &Path, is_dir: bool) -> PathBuf {
    if is_dir {
        return output.join("manifest.json");
    }
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".to_string());
    output.with_file_name(format!("{stem}.manifest.json"))
}
