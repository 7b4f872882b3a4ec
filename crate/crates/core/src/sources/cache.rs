use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{KnowledgeSource, SourceError, SourceRecord};
use crate::matching::MatchQuery;

/// One stored search response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CacheEntry {
    pub key: String,
    pub source_id: String,
    /// RFC 3339 timestamp of the backing search.
    pub fetched_at: String,
    pub records: Vec<SourceRecord>,
}

/// Memoizes a source's search responses on disk, one JSON file per query.
pub struct CachedSource<S> {
    inner: S,
    dir: PathBuf,
}

impl<S: KnowledgeSource> CachedSource<S> {
    pub fn new(inner: S, dir: impl Into<PathBuf>) -> Self {
        CachedSource { inner, dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(&self, query: &MatchQuery) -> String {
        let canonical = serde_json::to_string(query).expect("queries serialize");
        let digest = Sha256::digest(format!("{}\n{canonical}", self.inner.id()).as_bytes());
        hex::encode(digest)
    }

    pub fn entry_path(&self, query: &MatchQuery) -> PathBuf {
        self.dir.join(format!("{}.json", self.key(query)))
    }

    fn lookup(&self, path: &Path, key: &str) -> Result<Option<Vec<SourceRecord>>, io::Error> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e),
        };
        match serde_json::from_str::<CacheEntry>(&text) {
            Ok(entry) if entry.key == key && entry.source_id == self.inner.id() => Ok(Some(entry.records)),
            Ok(_) => {
                log::warn!("cache entry {} belongs to another query, refetching", path.display());
                Ok(None)
            }
            Err(e) => {
                log::warn!("corrupted cache entry {}: {e}, refetching", path.display());
                Ok(None)
            }
        }
    }
}

impl<S: KnowledgeSource> KnowledgeSource for CachedSource<S> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn search(&self, query: &MatchQuery) -> Result<Vec<SourceRecord>, SourceError> {
        let key = self.key(query);
        let path = self.dir.join(format!("{key}.json"));
        match self.lookup(&path, &key) {
            Ok(Some(records)) => return Ok(records),
            Ok(None) => {}
            Err(e) => {
                log::warn!("cache unavailable at {}: {e}", path.display());
                return self.inner.search(query);
            }
        }
        let records = self.inner.search(query)?;
        let entry = CacheEntry {
            key,
            source_id: self.inner.id().to_owned(),
            fetched_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            records,
        };
        let bytes = serde_json::to_vec_pretty(&entry).expect("entries serialize");
        if let Err(e) = write_atomically(&path, &bytes) {
            log::warn!("could not write cache entry {}: {e}", path.display());
        }
        Ok(entry.records)
    }
}

/// Writes to a sibling temp file and renames it over `path`.
pub(crate) fn write_atomically(path: &Path, bytes: &[u8]) -> io::Result<()> {
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(
        ".{name}.{}.{}.tmp",
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let result = std::fs::write(&tmp, bytes).and_then(|_| std::fs::rename(&tmp, path));
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}
