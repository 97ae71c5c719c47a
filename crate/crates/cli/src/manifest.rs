use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub params: Value,
    pub cutoff: Option<usize>,
    pub wall_time_s: f64,
    pub status: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub code_version: String,
    pub command: String,
    pub config_hash: String,
    pub config: Value,
    pub tolerances: Value,
    pub output: String,
    pub points: Vec<PointRecord>,
}

/// SHA-256 over a git blob header plus the compact JSON text (keys sorted).
pub fn config_hash(config: &Value) -> String {
    let body = serde_json::to_string(config).expect("serializable config");
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", body.len()).as_bytes());
    h.update(body.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// `dir/name.csv` -> `dir/name.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or("output");
    output.with_file_name(format!("{stem}.manifest.json"))
}

pub fn write_manifest(output: &Path, m: &RunManifest) -> Result<PathBuf> {
    let path = manifest_path(output);
    std::fs::write(&path, serde_json::to_string_pretty(m)? + "\n")?;
    Ok(path)
}
