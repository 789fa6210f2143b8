use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;

pub const CONFIG_FILE: &str = "config.toml";
pub const PLANT_TRACE: &str = "plant_trace.csv";
pub const CONTROLLER_TRACE: &str = "controller_trace.csv";
pub const FILTERED_FILE: &str = "filtered.csv";
pub const POWER_FILE: &str = "power.csv";
pub const EVENTS_FILE: &str = "events.csv";
pub const REPORT_FILE: &str = "report.json";
pub const FAULT_FILE: &str = "FAULT";
pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestFile {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

/// What produced a run directory. Carries no timestamps so reruns match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub sample_rate: Option<f64>,
    pub files: Vec<ManifestFile>,
}

/// Hashes the listed files that exist in `dir` and writes `manifest.json`
/// next to them.
pub fn write_manifest(
    dir: &Path,
    names: &[&str],
    config_text: &str,
    seed: Option<u64>,
    sample_rate: Option<f64>,
) -> Result<Manifest, HarnessError> {
    let mut names: Vec<&str> = names.iter().copied().filter(|n| dir.join(n).is_file()).collect();
    names.sort_unstable();
    let mut files = Vec::with_capacity(names.len());
    for name in names {
        let path = dir.join(name);
        let bytes = fs::read(&path).map_err(|e| HarnessError::io(&path, e))?;
        files.push(ManifestFile {
            name: name.to_string(),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len() as u64,
        });
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: sha256_hex(config_text.as_bytes()),
        seed,
        sample_rate,
        files,
    };
    let path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    fs::write(&path, json + "\n").map_err(|e| HarnessError::io(&path, e))?;
    Ok(manifest)
}
