//! On-disk cache of sweep outcomes.
//!
//! One file per `(machine digest, fuel, max_len)`:
//!
//! ```text
//! #kolmo-cache v1 machine=<sha256> fuel=<T> maxlen=<L>
//! <program-bits>\t<H|F|C>\t<output-bits-or-dash>\t<steps-used>
//! ...
//! ```
//!
//! Records are in program-index order, starting with the empty program
//! (rendered `-`). Files are written to a temporary name and renamed into
//! place. Readers hold a shared lock; eviction takes an exclusive lock and
//! skips files it cannot lock, so a file being read is never removed.

use std::fs::{self, File, OpenOptions, TryLockError};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::complexity::Sweep;
use crate::enumeration::{program_at, programs_up_to};
use crate::machine::{machine_digest, Fuel, RunOutcome, Status};

pub const CACHE_HEADER_PREFIX: &str = "#kolmo-cache v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepCache {
    dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcSummary {
    pub files_before: usize,
    pub bytes_before: u64,
    pub evicted: Vec<String>,
    pub skipped_in_use: Vec<String>,
    pub bytes_after: u64,
}

#[derive(Debug, Clone)]
struct CacheFile {
    path: PathBuf,
    bytes: u64,
    modified: SystemTime,
}

impl SweepCache {
    /// Larger sweeps are recomputed rather than written out.
    pub const MAX_CACHED_LEN: u32 = 20;

    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn stem(fuel: Fuel) -> String {
        format!("sweep-{}-T{}-L", &machine_digest()[..16], fuel)
    }

    pub fn path_for(&self, max_len: u32, fuel: Fuel) -> PathBuf {
        self.dir
            .join(format!("{}{}.tsv", Self::stem(fuel), max_len))
    }

    /// Loads the smallest cached sweep covering `max_len` at this fuel and
    /// truncates it. Unreadable, locked or malformed files count as misses.
    pub fn load(&self, max_len: u32, fuel: Fuel) -> Option<Sweep> {
        let stem = Self::stem(fuel);
        let mut candidates: Vec<(u32, PathBuf)> = fs::read_dir(&self.dir)
            .ok()?
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                let len: u32 = name
                    .strip_prefix(&stem)?
                    .strip_suffix(".tsv")?
                    .parse()
                    .ok()?;
                (len >= max_len).then(|| (len, e.path()))
            })
            .collect();
        candidates.sort();
        candidates
            .into_iter()
            .find_map(|(len, path)| read_locked(&path, len, fuel, max_len).ok())
    }

    pub fn store(&self, sweep: &Sweep) -> io::Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(sweep.max_len, sweep.fuel);
        let tmp = self.dir.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            path.file_name().and_then(|n| n.to_str()).unwrap_or("sweep")
        ));
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            write_sweep(&mut w, sweep)?;
            w.flush()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    fn files(&self) -> io::Result<Vec<CacheFile>> {
        let entries = match fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e),
        };
        let mut files = Vec::new();
        for entry in entries {
            let entry = entry?;
            let name = entry.file_name();
            let name = name.to_string_lossy();
            if !(name.starts_with("sweep-") && name.ends_with(".tsv")) {
                continue;
            }
            let meta = entry.metadata()?;
            files.push(CacheFile {
                path: entry.path(),
                bytes: meta.len(),
                modified: meta.modified()?,
            });
        }
        Ok(files)
    }

    pub fn total_bytes(&self) -> io::Result<u64> {
        Ok(self.files()?.iter().map(|f| f.bytes).sum())
    }

    /// Evicts least recently used files until the cache holds at most
    /// `max_bytes`. Files locked by a reader are skipped.
    pub fn gc(&self, max_bytes: u64) -> io::Result<GcSummary> {
        let mut files = self.files()?;
        files.sort_by(|a, b| a.modified.cmp(&b.modified).then(a.path.cmp(&b.path)));
        let bytes_before: u64 = files.iter().map(|f| f.bytes).sum();
        let mut summary = GcSummary {
            files_before: files.len(),
            bytes_before,
            evicted: Vec::new(),
            skipped_in_use: Vec::new(),
            bytes_after: bytes_before,
        };
        for f in files {
            if summary.bytes_after <= max_bytes {
                break;
            }
            let name = f
                .path
                .file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            let handle = match File::open(&f.path) {
                Ok(h) => h,
                Err(e) if e.kind() == io::ErrorKind::NotFound => continue,
                Err(e) => return Err(e),
            };
            match handle.try_lock() {
                Ok(()) => {
                    fs::remove_file(&f.path)?;
                    summary.bytes_after -= f.bytes;
                    summary.evicted.push(name);
                }
                Err(TryLockError::WouldBlock) => summary.skipped_in_use.push(name),
                Err(TryLockError::Error(e)) => return Err(e),
            }
        }
        Ok(summary)
    }
}

fn read_locked(path: &Path, file_len: u32, fuel: Fuel, want_len: u32) -> io::Result<Sweep> {
    let file = OpenOptions::new().read(true).open(path)?;
    match file.try_lock_shared() {
        Ok(()) => {}
        Err(TryLockError::WouldBlock) => {
            return Err(io::Error::new(
                io::ErrorKind::WouldBlock,
                "cache file locked",
            ))
        }
        Err(TryLockError::Error(e)) => return Err(e),
    }
    let sweep = read_sweep(
        BufReader::new(&file),
        Some((file_len, fuel)),
        Some(want_len),
    )?;
    let _ = file.set_modified(SystemTime::now());
    Ok(sweep)
}

pub fn write_sweep<W: Write>(w: &mut W, sweep: &Sweep) -> io::Result<()> {
    writeln!(
        w,
        "{CACHE_HEADER_PREFIX} machine={} fuel={} maxlen={}",
        machine_digest(),
        sweep.fuel,
        sweep.max_len
    )?;
    for (i, o) in sweep.outcomes.iter().enumerate() {
        writeln!(
            w,
            "{}\t{}\t{}\t{}",
            program_at(i as u64).to_dashed(),
            o.status.tag(),
            o.output.to_dashed(),
            o.steps_used
        )?;
    }
    Ok(())
}

fn bad(line: usize, what: &str) -> io::Error {
    io::Error::new(
        io::ErrorKind::InvalidData,
        format!("cache line {line}: {what}"),
    )
}

/// Parses a cache file. `expect` pins the header's `(maxlen, fuel)`;
/// `take_len` stops after the programs of that length.
pub fn read_sweep<R: BufRead>(
    reader: R,
    expect: Option<(u32, Fuel)>,
    take_len: Option<u32>,
) -> io::Result<Sweep> {
    let mut lines = reader.lines();
    let header = lines.next().ok_or_else(|| bad(1, "missing header"))??;
    let mut fields = header
        .strip_prefix(CACHE_HEADER_PREFIX)
        .ok_or_else(|| bad(1, "bad header"))?
        .split_whitespace();
    let mut field = |key: &str| -> io::Result<String> {
        fields
            .next()
            .and_then(|f| f.strip_prefix(key))
            .map(str::to_string)
            .ok_or_else(|| bad(1, "bad header field"))
    };
    if field("machine=")? != machine_digest() {
        return Err(bad(1, "machine digest mismatch"));
    }
    let fuel = Fuel(field("fuel=")?.parse().map_err(|_| bad(1, "bad fuel"))?);
    let max_len: u32 = field("maxlen=")?
        .parse()
        .map_err(|_| bad(1, "bad maxlen"))?;
    if expect.is_some_and(|e| e != (max_len, fuel)) {
        return Err(bad(1, "header does not match the requested sweep"));
    }
    let take_len = take_len.unwrap_or(max_len);
    if take_len > max_len {
        return Err(bad(1, "file too short for request"));
    }
    let want = programs_up_to(take_len).ok_or_else(|| bad(1, "maxlen too large"))?;
    let mut outcomes = Vec::with_capacity(want as usize);
    for i in 0..want {
        let n = i as usize + 2;
        let line = lines.next().ok_or_else(|| bad(n, "truncated"))??;
        let parts: Vec<&str> = line.split('\t').collect();
        let [prog, tag, out, steps] = parts[..] else {
            return Err(bad(n, "expected 4 fields"));
        };
        if prog != program_at(i).to_dashed() {
            return Err(bad(n, "program out of order"));
        }
        let mut tag_chars = tag.chars();
        let status = match (
            tag_chars.next().and_then(Status::from_tag),
            tag_chars.next(),
        ) {
            (Some(s), None) => s,
            _ => return Err(bad(n, "bad status")),
        };
        let output = BitString::parse_dashed(out).map_err(|_| bad(n, "bad output"))?;
        if status != Status::Halted && !output.is_empty() {
            return Err(bad(n, "output on a run that did not halt"));
        }
        let steps_used = steps.parse().map_err(|_| bad(n, "bad steps"))?;
        outcomes.push(RunOutcome {
            status,
            output,
            steps_used,
        });
    }
    Ok(Sweep {
        max_len: take_len,
        fuel,
        outcomes,
    })
}
