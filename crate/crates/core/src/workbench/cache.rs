use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::semantics::{cached_models, enumerate_models, publish_models, semantic_profile, FiniteModel, Policy, SemanticProfile, Theory};

/// Entries written by another version are ignored.
pub const CACHE_VERSION: &str = concat!("thdist ", env!("CARGO_PKG_VERSION"), " models/1");

pub const CACHE_ENV: &str = "THDIST_CACHE_DIR";

/// Model lists on local disk, one JSON file per theory and size, named by
/// a hash of the theory content, the size, the policy and the version.
#[derive(Debug, Clone)]
pub struct DiskCache {
    dir: PathBuf,
}

static TEMP_SEQ: AtomicU64 = AtomicU64::new(0);

impl DiskCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(DiskCache { dir })
    }

    /// The cache named by `THDIST_CACHE_DIR`, if set and usable.
    pub fn from_env() -> Option<Self> {
        let dir = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty())?;
        DiskCache::new(dir).ok()
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(theory: &Theory, size: usize, policy: &Policy) -> String {
        let mut h = Sha256::new();
        h.update(CACHE_VERSION);
        h.update(b"\0");
        h.update(theory.content_hash());
        h.update(format!("\0size {size}\0"));
        // the bound only steers bounded checks, never which models exist
        let caps = Policy { bound: 0, ..*policy };
        h.update(serde_json::to_string(&caps).expect("policy serializes"));
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, theory: &Theory, size: usize, policy: &Policy) -> Result<Option<Arc<Vec<FiniteModel>>>> {
        let text = match std::fs::read_to_string(self.path(&Self::key(theory, size, policy))) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let v: Value = serde_json::from_str(&text)?;
        if v["version"] != CACHE_VERSION || v["hash"] != theory.content_hash() || v["size"] != size {
            return Ok(None);
        }
        let models = v["models"]
            .as_array()
            .ok_or_else(|| Error::InvalidModel("cache entry without a model list".into()))?
            .iter()
            .map(|m| FiniteModel::from_json(m, theory.lang().clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(Arc::new(models)))
    }

    /// Writes an entry atomically: a temporary file in the cache directory,
    /// then a rename over the final name.
    pub fn store(&self, theory: &Theory, size: usize, policy: &Policy, models: &[FiniteModel]) -> Result<()> {
        let key = Self::key(theory, size, policy);
        let entry = json!({
            "version": CACHE_VERSION,
            "hash": theory.content_hash(),
            "size": size,
            "models": models.iter().map(FiniteModel::to_json).collect::<Vec<_>>(),
        });
        let tmp = self.dir.join(format!(
            ".{key}.{}.{}.tmp",
            std::process::id(),
            TEMP_SEQ.fetch_add(1, Ordering::Relaxed)
        ));
        std::fs::write(&tmp, serde_json::to_vec(&entry)?)?;
        std::fs::rename(&tmp, self.path(&key)).inspect_err(|_| {
            let _ = std::fs::remove_file(&tmp);
        })?;
        Ok(())
    }

    /// The size-`k` models, from memory, then disk, then enumeration.
    /// Returns whether the disk supplied them.
    pub fn models(&self, theory: &Theory, size: usize, policy: &Policy) -> Result<(Arc<Vec<FiniteModel>>, bool)> {
        policy.admits(theory, size)?;
        if let Some(hit) = cached_models(theory, size) {
            return Ok((hit, false));
        }
        if let Ok(Some(hit)) = self.load(theory, size, policy) {
            publish_models(theory, size, hit.clone());
            return Ok((hit, true));
        }
        let models = enumerate_models(theory, size, policy)?;
        self.store(theory, size, policy, &models)?;
        Ok((models, false))
    }

    pub fn profile(&self, theory: &Theory, bound: usize, policy: &Policy) -> Result<SemanticProfile> {
        for k in 1..=bound {
            self.models(theory, k, policy)?;
        }
        semantic_profile(theory, bound, policy)
    }

    /// Brings every admitted size up to `bound` of every theory into memory.
    /// Returns the number of lists read from disk.
    pub fn warm(&self, theories: &[Theory], bound: usize, policy: &Policy) -> Result<usize> {
        let jobs: Vec<(&Theory, usize)> = theories
            .iter()
            .flat_map(|t| (1..=bound).map(move |k| (t, k)))
            .filter(|(t, k)| policy.admits(t, *k).is_ok())
            .collect();
        let hits = jobs
            .par_iter()
            .map(|(t, k)| self.models(t, *k, policy).map(|(_, disk)| usize::from(disk)))
            .collect::<Result<Vec<_>>>()?;
        Ok(hits.into_iter().sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Language;

    fn theory() -> Theory {
        let l = Arc::new(Language::new("C", [("R", 2usize)], 3).unwrap());
        Theory::parse("Sym", l, &["(forall v0 (forall v1 (implies (R v0 v1) (R v1 v0))))"]).unwrap()
    }

    #[test]
    fn round_trip_and_transparency() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskCache::new(dir.path()).unwrap();
        let (t, p) = (theory(), Policy::default());
        let direct = enumerate_models(&t, 3, &p).unwrap();
        cache.store(&t, 3, &p, &direct).unwrap();
        let loaded = cache.load(&t, 3, &p).unwrap().unwrap();
        assert_eq!(*loaded, *direct);
        assert_eq!(
            cache.profile(&t, 3, &p).unwrap().spectrum(),
            semantic_profile(&t, 3, &p).unwrap().spectrum()
        );
    }

    #[test]
    fn stale_entries_are_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskCache::new(dir.path()).unwrap();
        let (t, p) = (theory(), Policy::default());
        let key = DiskCache::key(&t, 2, &p);
        std::fs::write(
            cache.path(&key),
            json!({"version": "old", "hash": t.content_hash(), "size": 2, "models": []}).to_string(),
        )
        .unwrap();
        assert!(cache.load(&t, 2, &p).unwrap().is_none());
        assert_ne!(key, DiskCache::key(&t, 3, &p));
    }
}
