//! Content-addressed report cache.
//!
//! `objects/<sha256>.json` holds report bytes named by their own hash;
//! `index/<config hash>` holds the object hash for a job. Every write goes
//! to a temporary file first and is renamed into place.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "CONFGRAPH_CACHE_DIR";

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Write `bytes` to `path` through a sibling temporary file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".tmp-{}-{}",
        std::process::id(),
        TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> io::Result<Cache> {
        fs::create_dir_all(dir.join("objects"))?;
        fs::create_dir_all(dir.join("index"))?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    fn object(&self, hash: &str) -> PathBuf {
        self.dir.join("objects").join(format!("{hash}.json"))
    }

    /// The cached report for a job, if present and intact.
    pub fn get(&self, key: &str) -> Option<Vec<u8>> {
        let hash = fs::read_to_string(self.dir.join("index").join(key)).ok()?;
        let bytes = fs::read(self.object(hash.trim())).ok()?;
        (sha256_hex(&bytes) == hash.trim()).then_some(bytes)
    }

    pub fn put(&self, key: &str, bytes: &[u8]) -> io::Result<()> {
        let hash = sha256_hex(bytes);
        let obj = self.object(&hash);
        if !obj.exists() {
            write_atomic(&obj, bytes)?;
        }
        write_atomic(&self.dir.join("index").join(key), hash.as_bytes())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GcSummary {
    pub objects: usize,
    pub verified: usize,
    pub evicted: Vec<String>,
    pub index_entries: usize,
    pub dangling_index: Vec<String>,
}

fn sorted_entries(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = match fs::read_dir(dir) {
        Ok(rd) => rd.filter_map(|e| e.ok().map(|e| e.path())).collect(),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(e),
    };
    v.sort();
    Ok(v)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Verify every object against its name, evict corrupt objects, stray
/// temporaries and index entries pointing nowhere.
pub fn cache_gc(dir: &Path) -> io::Result<GcSummary> {
    if !dir.is_dir() {
        return Err(io::Error::new(io::ErrorKind::NotFound, format!("{} is not a directory", dir.display())));
    }
    let mut s = GcSummary::default();
    for p in sorted_entries(&dir.join("objects"))? {
        let name = file_name(&p);
        if name.starts_with(".tmp-") {
            fs::remove_file(&p)?;
            s.evicted.push(format!("objects/{name}"));
            continue;
        }
        s.objects += 1;
        let ok = name
            .strip_suffix(".json")
            .map(|h| fs::read(&p).map(|b| sha256_hex(&b) == h).unwrap_or(false))
            .unwrap_or(false);
        if ok {
            s.verified += 1;
        } else {
            fs::remove_file(&p)?;
            s.evicted.push(format!("objects/{name}"));
        }
    }
    for p in sorted_entries(&dir.join("index"))? {
        let name = file_name(&p);
        if name.starts_with(".tmp-") {
            fs::remove_file(&p)?;
            s.evicted.push(format!("index/{name}"));
            continue;
        }
        s.index_entries += 1;
        let target = fs::read_to_string(&p).unwrap_or_default();
        let obj = dir.join("objects").join(format!("{}.json", target.trim()));
        if target.trim().is_empty() || !obj.exists() {
            fs::remove_file(&p)?;
            s.dangling_index.push(name);
        }
    }
    Ok(s)
}
