use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::experiments::output::write_atomic;

/// A named random stream and how its index is formed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamInfo {
    pub label: String,
    pub index: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: RunConfig,
    pub seed: u64,
    pub version: String,
    pub started: String,
    pub finished: String,
    pub wall_seconds: f64,
    pub threads: Option<usize>,
    pub outputs: Vec<String>,
    pub streams: Vec<StreamInfo>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

fn stream(label: &str, index: &str) -> StreamInfo {
    StreamInfo { label: label.into(), index: index.into() }
}

/// Streams drawn from by a subcommand. Seeds of the `sweep` and `haar` labels
/// are derived from the master seed and then drive `trajectory` streams.
pub fn streams_for(subcommand: &str, cfg: &RunConfig) -> Vec<StreamInfo> {
    let ground = cfg.experiment.initial == crate::experiments::InitialState::Ground;
    let mut s = Vec::new();
    if ground || matches!(subcommand, "haar") {
        s.push(stream("lanczos-start", "0"));
        s.push(stream("lanczos-excited", "0"));
    }
    if !ground || subcommand == "haar" {
        s.push(stream("haar-state", "sites << 32 | state index"));
    }
    match subcommand {
        "sweep-gamma" => s.push(stream("sweep", "sites << 32 | strength index (seed derivation)")),
        "haar" => s.push(stream("haar", "sites << 32 | state index (seed derivation)")),
        _ => {}
    }
    if !matches!(subcommand, "ground-state" | "correlations" | "wick") {
        s.push(stream("trajectory", "trajectory index"));
    }
    s
}

pub fn timestamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Output directory that remembers what was written to it.
pub struct Outputs {
    pub dir: PathBuf,
    pub files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Outputs { dir: dir.into(), files: Vec::new() }
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.dir.join(name), bytes)?;
        self.files.push(name.into());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::numeric(format!("{name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(self).map_err(|e| Error::invalid(e.to_string()))?;
        text.push('\n');
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        super::config::read_document(path, "manifest")
    }
}
