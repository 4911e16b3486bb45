//! Persistent weight cache: one JSON object mapping graph keys to records.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::WeightEstimate;
use crate::error::{Error, Result};
use crate::graphs::GraphKey;

/// Environment variable naming the cache file when no path is given.
pub const CACHE_ENV: &str = "DQ_CACHE";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl From<&WeightEstimate> for CacheRecord {
    fn from(e: &WeightEstimate) -> Self {
        CacheRecord { value: e.value, stderr: e.stderr, samples: e.samples, seed: e.seed }
    }
}

impl From<&CacheRecord> for WeightEstimate {
    fn from(r: &CacheRecord) -> Self {
        WeightEstimate { value: r.value, stderr: r.stderr, samples: r.samples, seed: r.seed, rejected: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct WeightCache {
    path: PathBuf,
    records: BTreeMap<GraphKey, CacheRecord>,
}

impl WeightCache {
    /// Opens `path`, or starts empty when the file does not exist.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let records = match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text)
                .map_err(|e| Error::CorruptCache(format!("{}: {e}", path.display())))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(WeightCache { path, records })
    }

    /// Opens `path` if given, else the file named by `DQ_CACHE`.
    pub fn open_default(path: Option<&Path>) -> Result<Option<Self>> {
        match path {
            Some(p) => Self::open(p).map(Some),
            None => match std::env::var_os(CACHE_ENV) {
                Some(p) => Self::open(PathBuf::from(p)).map(Some),
                None => Ok(None),
            },
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = (&GraphKey, &CacheRecord)> {
        self.records.iter()
    }

    pub fn get(&self, key: &GraphKey) -> Option<&CacheRecord> {
        self.records.get(key)
    }

    /// Stores `e` unless an existing record has at least as many samples.
    /// Returns whether the record was written.
    pub fn put(&mut self, key: GraphKey, e: &WeightEstimate) -> bool {
        match self.records.get(&key) {
            Some(old) if old.samples >= e.samples => false,
            _ => {
                self.records.insert(key, e.into());
                true
            }
        }
    }

    pub fn save(&self) -> Result<()> {
        let tmp = self.path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string_pretty(&self.records)?)?;
        fs::rename(&tmp, &self.path)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(samples: u64, value: f64) -> WeightEstimate {
        WeightEstimate { value, stderr: 0.1, samples, seed: 3, rejected: 0 }
    }

    #[test]
    fn policy_and_round_trip() {
        let dir = std::env::temp_dir().join(format!("dq-cache-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("w.json");
        let _ = fs::remove_file(&path);
        let mut c = WeightCache::open(&path).unwrap();
        let k = GraphKey("k".into());
        assert!(c.get(&k).is_none());
        assert!(c.put(k.clone(), &est(100, 0.5)));
        assert!(!c.put(k.clone(), &est(50, 0.9)));
        assert!(c.put(k.clone(), &est(200, 0.4)));
        c.save().unwrap();
        let c2 = WeightCache::open(&path).unwrap();
        assert_eq!(c2.get(&k).unwrap(), &CacheRecord { value: 0.4, stderr: 0.1, samples: 200, seed: 3 });
        fs::write(&path, "{not json").unwrap();
        assert!(matches!(WeightCache::open(&path), Err(Error::CorruptCache(_))));
        fs::remove_dir_all(&dir).unwrap();
    }
}
