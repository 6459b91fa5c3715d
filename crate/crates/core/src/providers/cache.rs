//! Append-only on-disk vector cache keyed by text content.
//!
//! Layout: `root/{provider}/{model_slug}/{kk}.jsonl` where `kk` is the first
//! two hex digits of the text's SHA-256 key, giving 256 shards per model.
//! Each line is one record with the full key, a vector checksum, and the
//! vector itself. Corruption is always surfaced as an error naming the shard
//! and line — a damaged cache is never silently refetched over.

use super::model::ModelRef;
use super::{Embedder, ProviderError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

/// Cache key of a text: its SHA-256, hex encoded.
pub fn text_key(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Short checksum over the vector's IEEE-754 bytes, catching bit rot and
/// truncated writes.
fn vector_check(vector: &[f64]) -> String {
    let mut h = Sha256::new();
    for v in vector {
        h.update(v.to_le_bytes());
    }
    hex::encode(&h.finalize()[..8])
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheRecord {
    key: String,
    check: String,
    vector: Vec<f64>,
}

/// A cache directory shared by all models.
pub struct CacheStore {
    root: PathBuf,
    write_lock: Mutex<()>,
}

impl CacheStore {
    /// Open (creating if needed) a cache rooted at `root`.
    pub fn open(root: &Path) -> Result<Self, ProviderError> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            write_lock: Mutex::new(()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn model_dir(&self, model: &ModelRef) -> PathBuf {
        self.root
            .join(model.provider().name())
            .join(model.slug())
    }

    fn shard_path(&self, model: &ModelRef, key: &str) -> PathBuf {
        self.model_dir(model).join(format!("{}.jsonl", &key[..2]))
    }

    fn read_shard(path: &Path) -> Result<HashMap<String, Vec<f64>>, ProviderError> {
        let mut map = HashMap::new();
        let content = match fs::read_to_string(path) {
            Ok(c) => c,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(map),
            Err(e) => return Err(e.into()),
        };
        for (i, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: CacheRecord =
                serde_json::from_str(line).map_err(|e| ProviderError::CacheCorrupt {
                    shard: path.display().to_string(),
                    line: i + 1,
                    detail: format!("bad record: {e}"),
                })?;
            let check = vector_check(&record.vector);
            if check != record.check {
                return Err(ProviderError::CacheCorrupt {
                    shard: path.display().to_string(),
                    line: i + 1,
                    detail: format!(
                        "checksum mismatch (stored {}, computed {check})",
                        record.check
                    ),
                });
            }
            map.insert(record.key, record.vector);
        }
        Ok(map)
    }

    /// Look up each text; `None` marks a miss. Fails loudly on shard
    /// corruption.
    pub fn lookup(
        &self,
        model: &ModelRef,
        texts: &[String],
    ) -> Result<Vec<Option<Vec<f64>>>, ProviderError> {
        let keys: Vec<String> = texts.iter().map(|t| text_key(t)).collect();
        let mut shards: HashMap<PathBuf, HashMap<String, Vec<f64>>> = HashMap::new();
        let mut out = Vec::with_capacity(texts.len());
        for key in &keys {
            let path = self.shard_path(model, key);
            if !shards.contains_key(&path) {
                let loaded = Self::read_shard(&path)?;
                shards.insert(path.clone(), loaded);
            }
            out.push(shards[&path].get(key).cloned());
        }
        Ok(out)
    }

    /// Append `(text, vector)` pairs. Vectors must be finite.
    pub fn store(
        &self,
        model: &ModelRef,
        entries: &[(String, Vec<f64>)],
    ) -> Result<(), ProviderError> {
        if entries.is_empty() {
            return Ok(());
        }
        for (text, vector) in entries {
            if vector.is_empty() || vector.iter().any(|v| !v.is_finite()) {
                return Err(ProviderError::InvalidInput {
                    detail: format!("refusing to cache a non-finite or empty vector for {text:?}"),
                });
            }
        }
        let mut by_shard: HashMap<PathBuf, Vec<String>> = HashMap::new();
        for (text, vector) in entries {
            let key = text_key(text);
            let record = CacheRecord {
                check: vector_check(vector),
                key: key.clone(),
                vector: vector.clone(),
            };
            let line = serde_json::to_string(&record).expect("record serializes");
            by_shard
                .entry(self.shard_path(model, &key))
                .or_default()
                .push(line);
        }
        let _guard = self.write_lock.lock().expect("cache write lock");
        for (path, lines) in by_shard {
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            let mut file = fs::OpenOptions::new().create(true).append(true).open(&path)?;
            let mut buf = String::new();
            for line in lines {
                buf.push_str(&line);
                buf.push('\n');
            }
            file.write_all(buf.as_bytes())?;
        }
        Ok(())
    }
}

/// Embed through the cache: hits are served from disk bit-for-bit, misses go
/// to `embedder` once and are stored for next time.
pub fn cached_embed(
    cache: &CacheStore,
    embedder: &dyn Embedder,
    texts: &[String],
) -> Result<Vec<Vec<f64>>, ProviderError> {
    let cached = cache.lookup(embedder.model(), texts)?;
    let miss_indices: Vec<usize> = cached
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.is_none().then_some(i))
        .collect();
    let mut fresh: HashMap<usize, Vec<f64>> = HashMap::new();
    if !miss_indices.is_empty() {
        let miss_texts: Vec<String> = miss_indices.iter().map(|&i| texts[i].clone()).collect();
        let rows = embedder.embed_texts(&miss_texts)?;
        if rows.len() != miss_texts.len() {
            return Err(ProviderError::MalformedResponse {
                detail: format!(
                    "embedder returned {} vectors for {} texts",
                    rows.len(),
                    miss_texts.len()
                ),
            });
        }
        let entries: Vec<(String, Vec<f64>)> = miss_texts
            .iter()
            .cloned()
            .zip(rows.iter().cloned())
            .collect();
        cache.store(embedder.model(), &entries)?;
        for (&i, row) in miss_indices.iter().zip(rows) {
            fresh.insert(i, row);
        }
    }
    Ok(cached
        .into_iter()
        .enumerate()
        .map(|(i, v)| match v {
            Some(vector) => vector,
            None => fresh.remove(&i).expect("miss was embedded"),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::synthetic::SyntheticEmbedder;
    use super::*;
    use std::sync::atomic::{AtomicU64, Ordering};

    struct CountingEmbedder {
        inner: SyntheticEmbedder,
        calls: AtomicU64,
        texts_embedded: AtomicU64,
    }

    impl CountingEmbedder {
        fn new(spec: &str) -> Self {
            let model = ModelRef::parse(spec).unwrap();
            Self {
                inner: SyntheticEmbedder::new(&model).unwrap(),
                calls: AtomicU64::new(0),
                texts_embedded: AtomicU64::new(0),
            }
        }
    }

    impl Embedder for CountingEmbedder {
        fn model(&self) -> &ModelRef {
            self.inner.model()
        }
        fn embed_texts(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, ProviderError> {
            self.calls.fetch_add(1, Ordering::Relaxed);
            self.texts_embedded
                .fetch_add(texts.len() as u64, Ordering::Relaxed);
            self.inner.embed_texts(texts)
        }
    }

    fn strings(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn lookup_returns_stored_bits_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CacheStore::open(dir.path()).unwrap();
        let model = ModelRef::parse("voyage-3.5").unwrap();
        let tricky = vec![0.1, -0.0, 1e-300, 123456789.123456789, f64::MIN_POSITIVE];
        cache
            .store(&model, &[("0.5".to_string(), tricky.clone())])
            .unwrap();
        let got = cache.lookup(&model, &strings(&["0.5", "0.6"])).unwrap();
        let hit = got[0].as_ref().expect("hit");
        assert_eq!(hit.len(), tricky.len());
        for (a, b) in hit.iter().zip(&tricky) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!(got[1].is_none());
    }

    #[test]
    fn models_do_not_share_entries() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CacheStore::open(dir.path()).unwrap();
        let a = ModelRef::parse("voyage-3.5").unwrap();
        let b = ModelRef::parse("voyage-3.5@16").unwrap();
        cache.store(&a, &[("1".to_string(), vec![1.0])]).unwrap();
        assert!(cache.lookup(&b, &strings(&["1"])).unwrap()[0].is_none());
        assert!(cache.lookup(&a, &strings(&["1"])).unwrap()[0].is_some());
    }

    #[test]
    fn shards_live_under_provider_and_model() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CacheStore::open(dir.path()).unwrap();
        let model = ModelRef::parse("voyage-3.5").unwrap();
        cache.store(&model, &[("7".to_string(), vec![1.0])]).unwrap();
        let shard = dir
            .path()
            .join("voyage")
            .join("voyage-3.5")
            .join(format!("{}.jsonl", &text_key("7")[..2]));
        assert!(shard.is_file(), "{shard:?}");
    }

    #[test]
    fn cached_embed_only_embeds_misses() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CacheStore::open(dir.path()).unwrap();
        let e = CountingEmbedder::new("synthetic:linear/d=4");
        let first = cached_embed(&cache, &e, &strings(&["0.1", "0.2", "0.3"])).unwrap();
        assert_eq!(e.texts_embedded.load(Ordering::Relaxed), 3);
        // Second run: all hits, no new embeddings.
        let second = cached_embed(&cache, &e, &strings(&["0.1", "0.2", "0.3"])).unwrap();
        assert_eq!(e.texts_embedded.load(Ordering::Relaxed), 3);
        assert_eq!(first, second);
        // Superset: only the two new texts get embedded.
        let third = cached_embed(&cache, &e, &strings(&["0.4", "0.1", "0.5"])).unwrap();
        assert_eq!(e.texts_embedded.load(Ordering::Relaxed), 5);
        assert_eq!(third[1], first[0]);
    }

    #[test]
    fn corrupt_json_is_an_error_not_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CacheStore::open(dir.path()).unwrap();
        let model = ModelRef::parse("voyage-3.5").unwrap();
        cache.store(&model, &[("7".to_string(), vec![1.0, 2.0])]).unwrap();
        let shard = dir
            .path()
            .join("voyage")
            .join("voyage-3.5")
            .join(format!("{}.jsonl", &text_key("7")[..2]));
        let mut content = fs::read_to_string(&shard).unwrap();
        content.push_str("{not json\n");
        fs::write(&shard, content).unwrap();
        match cache.lookup(&model, &strings(&["7"])).unwrap_err() {
            ProviderError::CacheCorrupt { shard: s, line, .. } => {
                assert!(s.ends_with(".jsonl"));
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn checksum_mismatch_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CacheStore::open(dir.path()).unwrap();
        let model = ModelRef::parse("voyage-3.5").unwrap();
        cache.store(&model, &[("7".to_string(), vec![1.0, 2.0])]).unwrap();
        let shard = dir
            .path()
            .join("voyage")
            .join("voyage-3.5")
            .join(format!("{}.jsonl", &text_key("7")[..2]));
        let content = fs::read_to_string(&shard).unwrap();
        let tampered = content.replace("1.0,2.0", "1.0,2.5");
        assert_ne!(content, tampered, "test must actually change the vector");
        fs::write(&shard, tampered).unwrap();
        assert!(matches!(
            cache.lookup(&model, &strings(&["7"])).unwrap_err(),
            ProviderError::CacheCorrupt { line: 1, .. }
        ));
    }

    #[test]
    fn non_finite_vectors_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CacheStore::open(dir.path()).unwrap();
        let model = ModelRef::parse("voyage-3.5").unwrap();
        assert!(cache
            .store(&model, &[("x".to_string(), vec![f64::NAN])])
            .is_err());
        assert!(cache.store(&model, &[("x".to_string(), vec![])]).is_err());
    }
}
