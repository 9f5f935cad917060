//! Persistent memo cache: JSON lines of {"v":1,"key":…,"no":…}, written
//! atomically via a temp file in the same directory.

use crate::index::Memo;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

#[derive(Serialize, Deserialize)]
struct CacheLine {
    v: u32,
    key: String,
    no: i32,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct LoadStats {
    pub loaded: usize,
    pub skipped: usize,
}

/// Loads cache entries into the memo. A missing file is an empty cache;
/// unreadable lines are counted, not fatal.
pub fn load(path: &Path, memo: &mut Memo) -> io::Result<LoadStats> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(LoadStats::default()),
        Err(e) => return Err(e),
    };
    let mut stats = LoadStats::default();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CacheLine>(line) {
            Ok(l) if l.v == 1 => {
                memo.insert(l.key, l.no);
                stats.loaded += 1;
            }
            _ => stats.skipped += 1,
        }
    }
    Ok(stats)
}

/// Writes the memo sorted by key, then renames over the target.
pub fn save(path: &Path, memo: &Memo) -> io::Result<()> {
    let mut entries: Vec<(&str, i32)> = memo.entries().collect();
    entries.sort_unstable();
    let mut body = String::new();
    for (key, no) in entries {
        let line = serde_json::to_string(&CacheLine { v: 1, key: key.to_string(), no })
            .expect("cache lines are plain data");
        body.push_str(&line);
        body.push('\n');
    }
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp: PathBuf = match dir {
        Some(d) => d.join(format!(".{}.tmp", path.file_name().unwrap().to_string_lossy())),
        None => PathBuf::from(format!(".{}.tmp", path.display())),
    };
    {
        let mut fh = fs::File::create(&tmp)?;
        fh.write_all(body.as_bytes())?;
        fh.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
