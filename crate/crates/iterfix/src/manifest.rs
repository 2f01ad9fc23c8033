//! Run manifests. Every artifact embeds a timestamp-free manifest (so two
//! identical runs produce byte-identical files); wall-clock data lives in a
//! `<out>.manifest.json` sidecar instead.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub format_version: String,
    pub subcommand: String,
    /// All flags with resolved defaults, stringified.
    pub flags: BTreeMap<String, String>,
    /// Input file path -> sha256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub seed: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: u64) -> RunManifest {
        RunManifest {
            tool: "iterfix".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            format_version: FORMAT_VERSION.to_string(),
            subcommand: subcommand.to_string(),
            flags: BTreeMap::new(),
            inputs: BTreeMap::new(),
            seed,
        }
    }

    pub fn flag(&mut self, name: &str, value: impl ToString) -> &mut Self {
        self.flags.insert(name.to_string(), value.to_string());
        self
    }

    pub fn input_bytes(&mut self, path: &Path, bytes: &[u8]) -> &mut Self {
        self.inputs
            .insert(path.display().to_string(), sha256_hex(bytes));
        self
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    format!("{:x}", h.finalize())
}

/// Timestamped wrapper written next to each artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar {
    pub manifest: RunManifest,
    pub timestamp_unix: u64,
    pub wall_ms: u64,
}

pub fn write_sidecar(artifact: &Path, manifest: &RunManifest, wall_ms: u64) -> std::io::Result<()> {
    let sidecar = Sidecar {
        manifest: manifest.clone(),
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        wall_ms,
    };
    let mut path = artifact.as_os_str().to_owned();
    path.push(".manifest.json");
    std::fs::write(
        path,
        serde_json::to_string_pretty(&sidecar).expect("sidecar serializes"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digests_are_stable() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn manifest_serialization_is_key_sorted() {
        let mut m = RunManifest::new("train", 42);
        m.flag("k", 2).flag("max-iter", 3).flag("corpus", "c.jsonl");
        let json = serde_json::to_string(&m).unwrap();
        let c = json.find("\"corpus\"").unwrap();
        let k = json.find("\"k\"").unwrap();
        let mi = json.find("\"max-iter\"").unwrap();
        assert!(c < k && k < mi);
    }
}
