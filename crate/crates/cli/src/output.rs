//! Output files are rendered in memory first and written only once every
//! input has loaded and every stage has succeeded.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliResult, Failure};

#[derive(Debug, Default)]
pub struct Bundle {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Bundle {
    pub fn new() -> Self {
        Self::default()
    }

    /// `name` is relative to the directory passed to [`Bundle::commit`].
    pub fn add(&mut self, name: impl Into<PathBuf>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn names(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    pub fn commit(&self, dir: &Path) -> CliResult<()> {
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)
                    .map_err(|e| Failure::input(format!("cannot create {}: {e}", parent.display())))?;
            }
            fs::write(&path, bytes).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    }
}

/// Write a single file, creating its parent directory.
pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Failure::input(format!("cannot create {}: {e}", parent.display())))?;
    }
    fs::write(path, bytes).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

pub fn jsonl<'a, T: Serialize + 'a>(records: impl IntoIterator<Item = &'a T>) -> CliResult<Vec<u8>> {
    let mut out = Vec::new();
    trendforge_core::corpus::write_jsonl(&mut out, records)
        .map_err(|e| Failure::invariant(format!("json encoding: {e}")))?;
    Ok(out)
}

pub fn json_pretty<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

pub fn csv_bytes<F>(header: &[&str], fill: F) -> CliResult<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    fill(&mut w)?;
    w.into_inner()
        .map_err(|e| Failure::invariant(format!("csv encoding: {e}")))
}
