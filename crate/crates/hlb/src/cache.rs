//! On-disk cache of optimizer runs, one JSON file per
//! `(family, m, p, starts, seed, tol)` key.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use hlb_core::OptimizeResult;
use serde::{Deserialize, Serialize};

use crate::formats::OptimizeJson;
use crate::rational::Rational;

pub const DEFAULT_CACHE_DIR: &str = ".hlb-cache";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheKey {
    pub family: String,
    pub m: usize,
    pub p: String,
    pub starts: usize,
    pub seed: u64,
    pub tol: f64,
}

impl CacheKey {
    pub fn new(family: &str, m: usize, p: Rational, starts: usize, seed: u64, tol: f64) -> Self {
        CacheKey { family: family.to_string(), m, p: p.to_string(), starts, seed, tol }
    }

    fn file_name(&self) -> String {
        let p = self.p.replace('/', "_");
        format!("{}-m{}-p{}-s{}-seed{:x}-tol{:e}.json", self.family, self.m, p, self.starts, self.seed, self.tol)
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: CacheKey,
    result: OptimizeJson,
}

#[derive(Debug, Clone)]
pub struct ResultCache {
    dir: PathBuf,
}

impl ResultCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ResultCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// A stored result for `key`. Files that fail to parse or belong to a
    /// different key count as misses.
    pub fn get(&self, key: &CacheKey) -> Option<OptimizeResult> {
        let text = fs::read_to_string(self.dir.join(key.file_name())).ok()?;
        let entry: Entry = serde_json::from_str(&text).ok()?;
        if entry.key != *key {
            return None;
        }
        entry.result.into_result().ok()
    }

    /// Writes through a temporary file so readers never see a partial entry.
    pub fn put(&self, key: &CacheKey, result: &OptimizeResult, p: Rational) -> anyhow::Result<()> {
        fs::create_dir_all(&self.dir).with_context(|| format!("creating cache dir {}", self.dir.display()))?;
        let entry = Entry { key: key.clone(), result: OptimizeJson::new(result, p) };
        let path = self.dir.join(key.file_name());
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let mut f = fs::File::create(&tmp).with_context(|| format!("writing {}", tmp.display()))?;
        f.write_all(serde_json::to_string(&entry)?.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, &path).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
