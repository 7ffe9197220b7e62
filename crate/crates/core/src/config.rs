//! Run configuration, provenance stamping, and atomic file output.
//!
//! Every artifact the pipeline writes embeds the hash of the configuration
//! that produced it plus the run seed, so equal hashes imply byte-identical
//! bodies and any divergence is attributable to a config change.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Result;

/// Full configuration of a pipeline run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    /// Date the ecosystem snapshot represents; versions released later are ignored.
    pub snapshot_date: NaiveDate,
    /// Majority share a strategy must exceed for a package to be labeled with it.
    pub threshold: f64,
    /// Master seed; every random decision derives from it.
    pub seed: u64,
    /// Number of trees in the ensemble.
    pub trees: usize,
    /// Minimum node size eligible for further splitting.
    pub min_split: usize,
    /// Worker threads (1 = sequential). Output bytes do not depend on this.
    pub threads: usize,
    /// Whether the train/test split preserves class shares.
    #[serde(default = "default_true")]
    pub stratified: bool,
    /// Extra spam name stems to drop during ingest, beyond the built-in list.
    #[serde(default)]
    pub spam_stems: Vec<String>,
    /// Input/output paths by role ("eco", "labels", "features", "model", ...).
    #[serde(default)]
    pub paths: BTreeMap<String, String>,
}

fn default_true() -> bool {
    true
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            snapshot_date: NaiveDate::from_ymd_opt(2020, 1, 12).unwrap(),
            threshold: 0.5,
            seed: 42,
            trees: 500,
            min_split: 8,
            threads: 1,
            stratified: true,
            spam_stems: Vec::new(),
            paths: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    /// Hex SHA-256 of the canonical JSON form. Thread count and file
    /// locations are excluded: neither may affect output bytes, so neither
    /// may affect the hash — only content-shaping settings do.
    pub fn content_hash(&self) -> String {
        let mut hashed = self.clone();
        hashed.threads = 1;
        hashed.paths = BTreeMap::new();
        let json = serde_json::to_string(&hashed).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        hex(&hasher.finalize())
    }

    /// Provenance block for JSON artifacts.
    pub fn provenance(&self) -> Provenance {
        Provenance {
            config_hash: self.content_hash(),
            seed: self.seed,
            snapshot_date: self.snapshot_date,
        }
    }

    /// Comment line prepended to CSV artifacts.
    pub fn csv_header(&self) -> String {
        format!(
            "# depstrat config_hash={} seed={}\n",
            self.content_hash(),
            self.seed
        )
    }
}

/// Identifies the run that produced an artifact.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub snapshot_date: NaiveDate,
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Write `bytes` to `path` atomically: write a sibling temp file, then rename.
/// Readers never observe a half-written artifact.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    let tmp = dir.join(format!(".{file_name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Serialize `value` with a provenance envelope and write it atomically.
pub fn write_json_artifact<T: Serialize>(
    path: &Path,
    config: &RunConfig,
    value: &T,
) -> Result<()> {
    #[derive(Serialize)]
    struct Envelope<'a, T> {
        provenance: Provenance,
        #[serde(flatten)]
        body: &'a T,
    }
    let env = Envelope {
        provenance: config.provenance(),
        body: value,
    };
    let mut json = serde_json::to_string_pretty(&env)?;
    json.push('\n');
    atomic_write(path, json.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_thread_count() {
        let a = RunConfig {
            threads: 1,
            ..RunConfig::default()
        };
        let b = RunConfig {
            threads: 8,
            ..RunConfig::default()
        };
        assert_eq!(a.content_hash(), b.content_hash());
        let c = RunConfig {
            seed: 43,
            ..RunConfig::default()
        };
        assert_ne!(a.content_hash(), c.content_hash());
    }

    #[test]
    fn hash_ignores_locations_but_not_content_settings() {
        let mut moved = RunConfig::default();
        moved
            .paths
            .insert("eco".into(), "/somewhere/else/eco.ndjson".into());
        assert_eq!(moved.content_hash(), RunConfig::default().content_hash());

        let unstratified = RunConfig {
            stratified: false,
            ..RunConfig::default()
        };
        assert_ne!(
            unstratified.content_hash(),
            RunConfig::default().content_hash()
        );
    }

    #[test]
    fn atomic_write_replaces_whole_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("artifact.json");
        atomic_write(&path, b"first").unwrap();
        atomic_write(&path, b"second").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"second");
        // no temp litter
        let leftovers: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        assert_eq!(leftovers.len(), 1);
    }
}
