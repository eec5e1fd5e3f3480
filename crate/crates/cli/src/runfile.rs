//! Run manifests and atomic output files.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Everything needed to reproduce a command invocation. Written alongside
/// the data outputs as `manifest.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub threads: usize,
    pub rng_algorithm: &'static str,
    pub config: serde_json::Value,
    pub input_digests: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub timing_ms: u128,
}

pub struct RunContext {
    started: Instant,
    out_dir: PathBuf,
    manifest: RunManifest,
}

impl RunContext {
    pub fn new(command: &str, seed: u64, threads: usize, out_dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(out_dir)
            .map_err(|e| CliError::data(format!("cannot create {}: {e}", out_dir.display())))?;
        Ok(Self {
            started: Instant::now(),
            out_dir: out_dir.to_path_buf(),
            manifest: RunManifest {
                tool: "grimp",
                version: env!("CARGO_PKG_VERSION"),
                command: command.to_string(),
                seed,
                threads,
                rng_algorithm: grimp_core::rng::RNG_ALGORITHM,
                config: serde_json::Value::Null,
                input_digests: BTreeMap::new(),
                outputs: Vec::new(),
                timing_ms: 0,
            },
        })
    }

    pub fn set_config<T: Serialize>(&mut self, config: &T) -> Result<(), CliError> {
        self.manifest.config =
            serde_json::to_value(config).map_err(|e| CliError::data(e.to_string()))?;
        Ok(())
    }

    pub fn record_input(&mut self, path: &Path) -> Result<(), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
        let digest = Sha256::digest(&bytes);
        self.manifest
            .input_digests
            .insert(path.display().to_string(), format!("{digest:x}"));
        Ok(())
    }

    /// Atomically write one output file into the run directory.
    pub fn write_output(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        write_atomic(&path, bytes)
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
        self.manifest.outputs.push(name.to_string());
        Ok(path)
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.manifest.timing_ms = self.started.elapsed().as_millis();
        let text = serde_json::to_string_pretty(&self.manifest)
            .map_err(|e| CliError::data(e.to_string()))?;
        let path = self.out_dir.join("manifest.json");
        write_atomic(&path, text.as_bytes())
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))?;
        Ok(())
    }
}

/// Write via a temp file in the same directory, then rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out")
    ));
    {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}
