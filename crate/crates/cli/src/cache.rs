//! Append-only JSONL memo of class numbers and counts.
//!
//! One record per line: {"version":1,"kind":"pi0","key":["1","6"],"value":["1"]}.
//! Keys and values are decimal integer strings so big values survive intact.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use log::warn;
use serde::{Deserialize, Serialize};

use qmpolar::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
pub const CACHE_ENV: &str = "QMPOLAR_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    HImag,
    HRealWide,
    HRealNarrow,
    Pell,
    HQuartic,
    Pi0,
    PiTotal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub version: u32,
    pub kind: Kind,
    pub key: Vec<String>,
    pub value: Vec<String>,
}

type Table = HashMap<(Kind, Vec<String>), Vec<String>>;

pub struct Cache {
    entries: Mutex<Table>,
    // appends go through this lock: one writer at a time
    sink: Mutex<Option<File>>,
    path: Option<PathBuf>,
    computed: AtomicUsize,
}

impl Cache {
    pub fn memory() -> Self {
        Cache { entries: Mutex::new(HashMap::new()), sink: Mutex::new(None), path: None, computed: AtomicUsize::new(0) }
    }

    /// QMPOLAR_CACHE, else $XDG_CACHE_HOME/qmpolar/cache.jsonl, else ~/.cache/...
    pub fn default_path() -> Option<PathBuf> {
        if let Some(p) = std::env::var_os(CACHE_ENV) {
            return Some(PathBuf::from(p));
        }
        let base = std::env::var_os("XDG_CACHE_HOME")
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
        Some(base.join("qmpolar").join("cache.jsonl"))
    }

    /// Load what is readable; anything unwritable degrades to memory-only.
    pub fn open(path: &Path) -> Self {
        let mut cache = Cache::memory();
        cache.path = Some(path.to_path_buf());
        let stale = match File::open(path) {
            Ok(_) if path.is_dir() => {
                warn!("cache {} is a directory; starting empty", path.display());
                0
            }
            Ok(f) => cache.load(f, path),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => 0,
            Err(e) => {
                warn!("cache {} unreadable ({e}); starting empty", path.display());
                0
            }
        };
        if stale > 0 {
            if let Err(e) = cache.rewrite(path) {
                warn!("could not rewrite cache {}: {e}", path.display());
            }
        }
        match open_append(path) {
            Ok(f) => *cache.sink.get_mut().unwrap() = Some(f),
            Err(e) => warn!("cache {} not writable ({e}); memory-only mode", path.display()),
        }
        cache
    }

    // Returns the number of records with another format version.
    fn load(&mut self, f: File, path: &Path) -> usize {
        let table = self.entries.get_mut().unwrap();
        let mut stale = 0;
        for (i, line) in BufReader::new(f).lines().enumerate() {
            let Ok(line) = line else {
                warn!("{}:{}: read failed, ignoring the rest", path.display(), i + 1);
                break;
            };
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<CacheRecord>(&line) {
                Ok(r) if r.version == FORMAT_VERSION => {
                    table.insert((r.kind, r.key), r.value);
                }
                Ok(_) => stale += 1,
                Err(e) => warn!("{}:{}: corrupted record skipped ({e})", path.display(), i + 1),
            }
        }
        stale
    }

    // Replace the file by the current-version records, sorted for diffability.
    fn rewrite(&self, path: &Path) -> std::io::Result<()> {
        let table = self.entries.lock().unwrap();
        let mut rows: Vec<_> = table.iter().collect();
        rows.sort_by(|a, b| format!("{:?}", a.0).cmp(&format!("{:?}", b.0)));
        let tmp = path.with_extension("jsonl.tmp");
        let mut out = File::create(&tmp)?;
        for ((kind, key), value) in rows {
            writeln!(out, "{}", line_for(*kind, key, value))?;
        }
        out.sync_all()?;
        fs::rename(tmp, path)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn is_persistent(&self) -> bool {
        self.sink.lock().unwrap().is_some()
    }

    /// Number of values computed (not served from the memo) so far.
    pub fn computed(&self) -> usize {
        self.computed.load(Ordering::Relaxed)
    }

    pub fn get(&self, kind: Kind, key: &[String]) -> Option<Vec<String>> {
        self.entries.lock().unwrap().get(&(kind, key.to_vec())).cloned()
    }

    pub fn get_or_compute(
        &self,
        kind: Kind,
        key: Vec<String>,
        compute: impl FnOnce() -> Result<Vec<String>>,
    ) -> Result<Vec<String>> {
        if let Some(v) = self.get(kind, &key) {
            return Ok(v);
        }
        let value = compute()?;
        self.computed.fetch_add(1, Ordering::Relaxed);
        self.append(kind, &key, &value);
        self.entries.lock().unwrap().insert((kind, key), value.clone());
        Ok(value)
    }

    /// Single-integer convenience wrapper.
    pub fn integer(&self, kind: Kind, key: Vec<String>, compute: impl FnOnce() -> Result<u64>) -> Result<u64> {
        let v = self.get_or_compute(kind, key, || compute().map(|n| vec![n.to_string()]))?;
        match v.as_slice() {
            [s] => s.parse().map_err(|_| Error::Inconsistency(format!("cached {kind:?} value {s:?} is not an integer"))),
            _ => Err(Error::Inconsistency(format!("cached {kind:?} record has {} values", v.len()))),
        }
    }

    fn append(&self, kind: Kind, key: &[String], value: &[String]) {
        let mut sink = self.sink.lock().unwrap();
        let Some(f) = sink.as_mut() else { return };
        let line = format!("{}\n", line_for(kind, key, value));
        if let Err(e) = f.write_all(line.as_bytes()).and_then(|_| f.flush()) {
            warn!("cache append failed ({e}); memory-only mode from here on");
            *sink = None;
        }
    }
}

fn line_for(kind: Kind, key: &[String], value: &[String]) -> String {
    let rec = CacheRecord { version: FORMAT_VERSION, kind, key: key.to_vec(), value: value.to_vec() };
    serde_json::to_string(&rec).expect("cache records serialize")
}

// Open for append, terminating a torn last line first so the next record
// starts clean.
fn open_append(path: &Path) -> std::io::Result<File> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut f = OpenOptions::new().create(true).read(true).append(true).open(path)?;
    let len = f.metadata()?.len();
    if len > 0 {
        let mut last = [0u8; 1];
        f.seek(SeekFrom::Start(len - 1))?;
        f.read_exact(&mut last)?;
        if last[0] != b'\n' {
            f.write_all(b"\n")?;
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(s: &str) -> Vec<String> {
        vec![s.to_string()]
    }

    #[test]
    fn warm_hit_skips_compute() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let cold = Cache::open(&path);
        assert_eq!(cold.integer(Kind::HImag, key("-24"), || Ok(2)).unwrap(), 2);
        assert_eq!(cold.computed(), 1);
        drop(cold);
        let warm = Cache::open(&path);
        let v = warm.integer(Kind::HImag, key("-24"), || panic!("recomputed")).unwrap();
        assert_eq!((v, warm.computed()), (2, 0));
    }

    #[test]
    fn corrupted_and_stale_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        fs::write(
            &path,
            "{\"version\":0,\"kind\":\"h_imag\",\"key\":[\"-24\"],\"value\":[\"9\"]}\nnot json\n{\"version\":1,\"kind\":\"pi0\",\"key\":[\"1\",\"6\"],\"value\":[\"1\"]}\n{\"version\":1,\"ki",
        )
        .unwrap();
        let c = Cache::open(&path);
        // the stale record is recomputed rather than trusted
        assert_eq!(c.integer(Kind::HImag, key("-24"), || Ok(2)).unwrap(), 2);
        assert_eq!(c.get(Kind::Pi0, &["1".into(), "6".into()]), Some(vec!["1".into()]));
        drop(c);
        let text = fs::read_to_string(&path).unwrap();
        assert!(!text.contains("\"version\":0"));
        for line in text.lines() {
            serde_json::from_str::<CacheRecord>(line).unwrap();
        }
    }

    #[test]
    fn torn_tail_is_terminated() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        fs::write(&path, "{\"version\":1,\"kind\":\"pi0\",\"key\":[\"1\",\"6\"],\"value\":[\"1\"]}\n{\"vers").unwrap();
        let c = Cache::open(&path);
        c.integer(Kind::Pi0, key("15"), || Ok(2)).unwrap();
        drop(c);
        let c = Cache::open(&path);
        assert_eq!(c.get(Kind::Pi0, &key("15")), Some(vec!["2".into()]));
    }

    #[test]
    fn unwritable_path_is_memory_only() {
        let dir = tempfile::tempdir().unwrap();
        // a directory where the file should be
        let c = Cache::open(dir.path());
        assert!(!c.is_persistent());
        assert_eq!(c.integer(Kind::Pi0, key("6"), || Ok(1)).unwrap(), 1);
        assert_eq!(c.integer(Kind::Pi0, key("6"), || Ok(99)).unwrap(), 1);
    }
}
