use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Sidecar describing how a set of artifacts was produced.
#[derive(Debug, Serialize)]
pub struct Metadata {
    pub command: String,
    pub flags: Value,
    pub seeds: BTreeMap<String, u64>,
    pub timestamp: String,
    pub artifact_hashes: BTreeMap<String, String>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn sidecar_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    artifact.with_file_name(name)
}

/// Writes `<first artifact>.meta.json`. Does nothing without artifacts.
pub fn write_sidecar<F: Serialize>(command: &str, flags: &F, seeds: &[(&str, u64)], artifacts: &[&Path]) -> Result<()> {
    let Some(first) = artifacts.first() else {
        return Ok(());
    };
    let mut hashes = BTreeMap::new();
    for a in artifacts {
        hashes.insert(a.display().to_string(), sha256_file(a)?);
    }
    let meta = Metadata {
        command: command.to_owned(),
        flags: serde_json::to_value(flags)?,
        seeds: seeds.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        artifact_hashes: hashes,
    };
    let path = sidecar_path(first);
    std::fs::write(&path, serde_json::to_string_pretty(&meta)? + "\n")
        .with_context(|| format!("writing {}", path.display()))
}
