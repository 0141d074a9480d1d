//! Append-only JSON-lines result cache. The last line for a key wins.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::jobs::Progress;
use crate::report::{CountReport, CODE_VERSION};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CacheKey {
    pub q: u64,
    pub lambda: String,
    pub operation: String,
    pub code_version: String,
}

impl CacheKey {
    pub fn new(q: u64, lambda: &str, operation: &str) -> Self {
        CacheKey {
            q,
            lambda: lambda.to_string(),
            operation: operation.to_string(),
            code_version: CODE_VERSION.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Complete,
    Partial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub schema: u32,
    #[serde(flatten)]
    pub key: CacheKey,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reports: Vec<CountReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub progress: Option<Progress>,
    /// Wall-clock time spent so far, summed over resumed runs.
    pub elapsed_ms: u64,
}

impl CacheEntry {
    pub fn complete(key: CacheKey, reports: Vec<CountReport>, elapsed_ms: u64) -> Self {
        CacheEntry { schema: SCHEMA, key, status: Status::Complete, reports, progress: None, elapsed_ms }
    }

    pub fn partial(key: CacheKey, progress: Progress, elapsed_ms: u64) -> Self {
        CacheEntry { schema: SCHEMA, key, status: Status::Partial, reports: Vec::new(), progress: Some(progress), elapsed_ms }
    }

    pub fn is_complete(&self) -> bool {
        self.status == Status::Complete
    }
}

/// In-memory view of the cache file. Only the owner writes to it.
#[derive(Debug, Default)]
pub struct Cache {
    path: Option<PathBuf>,
    entries: HashMap<CacheKey, CacheEntry>,
}

impl Cache {
    /// A cache that keeps entries in memory only.
    pub fn in_memory() -> Self {
        Cache::default()
    }

    /// Loads every readable entry. Torn or foreign lines are skipped.
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut entries = HashMap::new();
        match File::open(&path) {
            Ok(f) => {
                for line in BufReader::new(f).lines() {
                    let line = line?;
                    if let Ok(e) = serde_json::from_str::<CacheEntry>(&line) {
                        if e.schema == SCHEMA {
                            Self::merge(&mut entries, e);
                        }
                    }
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(e),
        }
        Ok(Cache { path: Some(path), entries })
    }

    fn merge(entries: &mut HashMap<CacheKey, CacheEntry>, e: CacheEntry) {
        if entries.get(&e.key).is_some_and(|old| old.is_complete()) {
            return;
        }
        entries.insert(e.key.clone(), e);
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: &CacheKey) -> Option<&CacheEntry> {
        self.entries.get(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends an entry. Completed entries are never replaced.
    pub fn put(&mut self, entry: CacheEntry) -> io::Result<()> {
        if self.entries.get(&entry.key).is_some_and(|old| old.is_complete()) {
            return Ok(());
        }
        if let Some(path) = &self.path {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let mut line = serde_json::to_string(&entry).map_err(io::Error::other)?;
            line.push('\n');
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            f.write_all(line.as_bytes())?;
            f.sync_data()?;
        }
        self.entries.insert(entry.key.clone(), entry);
        Ok(())
    }
}
