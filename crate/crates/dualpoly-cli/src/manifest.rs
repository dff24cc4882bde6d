//! Run manifests: what was run, with which parameters and seeds, and the
//! SHA-256 digests of every artifact and certificate it produced.
//!
//! Certificates are serialized canonically (sorted keys, no whitespace), so
//! re-running a manifest's command reproduces byte-identical certificates and
//! therefore identical digests. Wall-clock time is recorded but excluded from
//! the comparison.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::json::SCHEMA_VERSION;

/// One file written by a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// File name relative to the output directory.
    pub path: String,
    /// Hex SHA-256 of the file contents.
    pub sha256: String,
}

/// Record of one command invocation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Schema version.
    pub schema: String,
    /// Subcommand path, e.g. `witness build dual-or`.
    pub command: String,
    /// Full argument vector (without the program name).
    pub argv: Vec<String>,
    /// Parsed parameters.
    pub parameters: BTreeMap<String, String>,
    /// Seeds used by randomized steps.
    pub seeds: Vec<u64>,
    /// Files written.
    pub artifacts: Vec<Artifact>,
    /// Digest of each certificate's canonical JSON.
    pub certificate_digests: BTreeMap<String, String>,
    /// Overall verdict.
    pub pass: bool,
    /// Wall-clock time in milliseconds (not part of reproducibility).
    pub wall_clock_ms: u128,
}

impl RunManifest {
    /// An empty manifest for `command`.
    pub fn new(command: &str, argv: Vec<String>) -> Self {
        RunManifest {
            schema: SCHEMA_VERSION.into(),
            command: command.into(),
            argv,
            parameters: BTreeMap::new(),
            seeds: Vec::new(),
            artifacts: Vec::new(),
            certificate_digests: BTreeMap::new(),
            pass: false,
            wall_clock_ms: 0,
        }
    }

    /// Reads a manifest file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Writes the manifest as pretty JSON.
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")
            .with_context(|| format!("writing {}", path.display()))
    }

    /// Names of certificates whose digests differ between two manifests,
    /// including ones present in only one of them.
    pub fn digest_mismatches(&self, other: &RunManifest) -> Vec<String> {
        let mut keys: Vec<&String> = self.certificate_digests.keys().chain(other.certificate_digests.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter(|k| self.certificate_digests.get(*k) != other.certificate_digests.get(*k))
            .cloned()
            .collect()
    }
}

/// Hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Canonical serialization: keys sorted (serde_json's default map), compact.
pub fn canonical(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn canonical_digests_ignore_key_order() {
        let a: Value = serde_json::from_str(r#"{"b": 1, "a": [1, 2]}"#).unwrap();
        let b = json!({ "a": [1, 2], "b": 1 });
        assert_eq!(sha256_hex(canonical(&a).as_bytes()), sha256_hex(canonical(&b).as_bytes()));
    }

    #[test]
    fn manifest_roundtrip_and_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new("oracle degthr", vec!["oracle".into()]);
        m.certificate_digests.insert("answer".into(), "00".into());
        let p = dir.path().join("manifest.json");
        m.save(&p).unwrap();
        let back = RunManifest::load(&p).unwrap();
        assert_eq!(back, m);
        let mut other = back.clone();
        other.certificate_digests.insert("answer".into(), "01".into());
        assert_eq!(m.digest_mismatches(&other), vec!["answer".to_string()]);
    }
}
