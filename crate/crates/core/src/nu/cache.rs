//! Append-only JSON-lines store of computed [`NuRecord`]s.
//!
//! One record per line. On open, a corrupt final line (an interrupted
//! append) is dropped and the file truncated to the last complete record;
//! corruption anywhere else is an error. The file is held under an exclusive
//! lock for the life of the store, so there is a single writer per file.

use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::NuRecord;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cache file {path} is locked by another process")]
    Locked { path: PathBuf },
    #[error("cache file {path}: corrupt record on line {line}")]
    Corrupt { path: PathBuf, line: usize },
}

#[derive(Debug, Default)]
pub struct CacheStore {
    path: Option<PathBuf>,
    file: Option<File>,
    records: Vec<NuRecord>,
    truncated_tail: bool,
}

impl CacheStore {
    pub fn in_memory() -> Self {
        CacheStore::default()
    }

    pub fn open(path: impl AsRef<Path>) -> Result<Self, CacheError> {
        let path = path.as_ref().to_path_buf();
        let io = |source| CacheError::Io {
            path: path.clone(),
            source,
        };
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(&path)
            .map_err(io)?;
        match file.try_lock() {
            Ok(()) => {}
            Err(std::fs::TryLockError::WouldBlock) => return Err(CacheError::Locked { path }),
            Err(std::fs::TryLockError::Error(e)) => return Err(io(e)),
        }
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes).map_err(io)?;

        let mut records = Vec::new();
        let mut offset = 0usize;
        let mut good_end = 0usize;
        let mut truncated_tail = false;
        let mut line_no = 0;
        while offset < bytes.len() {
            line_no += 1;
            let (line, next, complete) = match bytes[offset..].iter().position(|&b| b == b'\n') {
                Some(k) => (&bytes[offset..offset + k], offset + k + 1, true),
                None => (&bytes[offset..], bytes.len(), false),
            };
            let is_last = next >= bytes.len();
            if line.iter().all(|b| b.is_ascii_whitespace()) {
                offset = next;
                if complete {
                    good_end = next;
                }
                continue;
            }
            match serde_json::from_slice::<NuRecord>(line) {
                Ok(rec) if complete => {
                    records.push(rec);
                    good_end = next;
                }
                Ok(_) | Err(_) if is_last => {
                    // interrupted append
                    truncated_tail = true;
                    break;
                }
                Ok(_) | Err(_) => return Err(CacheError::Corrupt { path, line: line_no }),
            }
            offset = next;
        }
        if truncated_tail || good_end < bytes.len() {
            file.set_len(good_end as u64).map_err(io)?;
        }
        file.seek(SeekFrom::End(0)).map_err(io)?;
        Ok(CacheStore {
            path: Some(path),
            file: Some(file),
            records,
            truncated_tail,
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// True if the last open dropped a partial record.
    pub fn truncated_on_open(&self) -> bool {
        self.truncated_tail
    }

    pub fn records(&self) -> &[NuRecord] {
        &self.records
    }

    pub fn lookup(&self, ring_digest: &str, i_digest: &str, j_digest: &str, e: u32) -> Option<&NuRecord> {
        self.records
            .iter()
            .find(|r| r.e == e && r.ring_digest == ring_digest && r.i_digest == i_digest && r.j_digest == j_digest)
    }

    pub fn append(&mut self, rec: NuRecord) -> Result<(), CacheError> {
        if let (Some(file), Some(path)) = (self.file.as_mut(), self.path.as_ref()) {
            let mut line = serde_json::to_string(&rec).expect("records serialize");
            line.push('\n');
            file.write_all(line.as_bytes())
                .and_then(|_| file.flush())
                .map_err(|source| CacheError::Io {
                    path: path.clone(),
                    source,
                })?;
        }
        self.records.push(rec);
        Ok(())
    }
}
