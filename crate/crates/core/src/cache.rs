//! Persistent cache of computed objects and verification reports.
//!
//! Records are single JSON files keyed by object kind plus a canonical
//! parameter encoding; payloads are decimal strings (never binary floats)
//! and carry a SHA-256 digest. Version mismatches and digest mismatches are
//! reported, never silently migrated or repaired.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheRecord {
    pub version: u32,
    pub key: String,
    /// payload fields as decimal strings (or nested JSON of such)
    pub payload: serde_json::Value,
    pub precision: i64,
    pub digest: String,
}

pub fn payload_digest(payload: &serde_json::Value) -> String {
    let canon = serde_json::to_string(payload).expect("serializable payload");
    let mut h = Sha256::new();
    h.update(canon.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl CacheRecord {
    pub fn new(key: String, payload: serde_json::Value, precision: i64) -> Self {
        let digest = payload_digest(&payload);
        CacheRecord {
            version: SCHEMA_VERSION,
            key,
            payload,
            precision,
            digest,
        }
    }

    pub fn verify(&self) -> Result<()> {
        if self.version != SCHEMA_VERSION {
            return Err(Error::Cache(format!(
                "schema version {} != {} for key {}",
                self.version, SCHEMA_VERSION, self.key
            )));
        }
        let d = payload_digest(&self.payload);
        if d != self.digest {
            return Err(Error::Cache(format!(
                "digest mismatch for key {}: stored {}, computed {}",
                self.key, self.digest, d
            )));
        }
        Ok(())
    }
}

/// Cache backend: in-memory always, plus an optional directory.
pub struct CacheStore {
    dir: Option<PathBuf>,
    mem: RwLock<HashMap<String, CacheRecord>>,
}

impl CacheStore {
    pub fn in_memory() -> Self {
        CacheStore {
            dir: None,
            mem: RwLock::new(HashMap::new()),
        }
    }

    pub fn at_dir(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(CacheStore {
            dir: Some(dir.to_path_buf()),
            mem: RwLock::new(HashMap::new()),
        })
    }

    fn file_for(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| {
            let mut h = Sha256::new();
            h.update(key.as_bytes());
            let name: String = h
                .finalize()
                .iter()
                .take(16)
                .map(|b| format!("{b:02x}"))
                .collect();
            d.join(format!("{name}.json"))
        })
    }

    pub fn get(&self, key: &str) -> Option<CacheRecord> {
        if let Some(r) = self.mem.read().unwrap().get(key) {
            return Some(r.clone());
        }
        let path = self.file_for(key)?;
        let data = std::fs::read_to_string(path).ok()?;
        let rec: CacheRecord = serde_json::from_str(&data).ok()?;
        if rec.verify().is_err() || rec.key != key {
            return None;
        }
        self.mem
            .write()
            .unwrap()
            .insert(key.to_string(), rec.clone());
        Some(rec)
    }

    pub fn put(&self, rec: CacheRecord) -> Result<()> {
        if let Some(path) = self.file_for(&rec.key) {
            std::fs::write(&path, serde_json::to_string_pretty(&rec)?)?;
        }
        self.mem.write().unwrap().insert(rec.key.clone(), rec);
        Ok(())
    }

    /// All records present on disk (for the cache subcommands).
    pub fn disk_records(&self) -> Result<Vec<(PathBuf, Result<CacheRecord>)>> {
        let Some(dir) = &self.dir else {
            return Ok(vec![]);
        };
        let mut out = Vec::new();
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let parsed = std::fs::read_to_string(&path)
                .map_err(Error::from)
                .and_then(|s| serde_json::from_str::<CacheRecord>(&s).map_err(Error::from))
                .and_then(|r| r.verify().map(|_| r));
            out.push((path, parsed));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    pub fn remove_file(&self, path: &Path) -> Result<()> {
        std::fs::remove_file(path)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_tamper_detection() {
        let dir = std::env::temp_dir().join(format!("cyclolab-cache-test-{}", std::process::id()));
        let store = CacheStore::at_dir(&dir).unwrap();
        let rec = CacheRecord::new(
            "hminus:p=23:n=0".into(),
            serde_json::json!({"value": "3"}),
            0,
        );
        store.put(rec.clone()).unwrap();
        let back = store.get("hminus:p=23:n=0").unwrap();
        assert_eq!(back.payload["value"], "3");
        assert_eq!(back.digest, rec.digest);
        // tamper with the payload on disk
        let (path, _) = &store.disk_records().unwrap()[0];
        let mut r2: CacheRecord =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        r2.payload = serde_json::json!({"value": "4"});
        std::fs::write(path, serde_json::to_string(&r2).unwrap()).unwrap();
        let listed = store.disk_records().unwrap();
        assert!(listed[0].1.is_err(), "tampered record must fail digest check");
        std::fs::remove_dir_all(&dir).ok();
    }
}
