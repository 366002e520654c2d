//! Sidecar run manifest: tool version, master seed, input digests and the
//! full argument list. Two runs with equal manifests must produce
//! byte-identical data files, so nothing time- or host-dependent goes in.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    /// input path → SHA-256 hex digest of its bytes
    pub inputs: BTreeMap<String, String>,
    pub args: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, seed: u64) -> Self {
        Manifest {
            tool: "glassbox",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            inputs: BTreeMap::new(),
            args: std::env::args().skip(1).collect(),
        }
    }

    pub fn record_input(&mut self, path: &Path) -> glassbox::Result<()> {
        let bytes = std::fs::read(path)?;
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.insert(path.display().to_string(), hex);
        Ok(())
    }

    pub fn write(&self, out_dir: &Path) -> glassbox::Result<PathBuf> {
        let path = out_dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}
