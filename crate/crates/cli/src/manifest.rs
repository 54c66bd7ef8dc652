use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Record of one run: what went in, how it was configured and which files
/// came out.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: InputRef,
    pub config: Map<String, Value>,
    pub outputs: Vec<String>,
    pub timestamp_unix: u64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputRef {
    Path(String),
    Generator(String),
    Dataset(String),
}

/// Collects output files for a run directory and writes the manifest last.
pub struct Bundle {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Bundle {
    pub fn create(dir: &Path, command: &'static str, input: InputRef) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Bundle {
            dir: dir.to_path_buf(),
            manifest: RunManifest {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command,
                input,
                config: Map::new(),
                outputs: Vec::new(),
                timestamp_unix: 0,
            },
        })
    }

    pub fn config(&mut self, key: &str, value: impl Into<Value>) {
        self.manifest.config.insert(key.to_string(), value.into());
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.outputs.push(name.to_string());
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.manifest.timestamp_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let path = self.dir.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(&self.manifest)?;
        fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
