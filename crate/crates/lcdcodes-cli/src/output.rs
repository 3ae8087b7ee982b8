//! Report plumbing: JSON, CSV and transcript artifacts under `--out`.
//!
//! Serialisation is deliberately stable — pretty JSON with struct-declared
//! field order, no timestamps or host data — so re-running a command on the
//! same inputs reproduces every artifact byte for byte.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;

/// The `--out` directory, if any; all writers are no-ops without one.
pub struct OutDir(Option<PathBuf>);

impl OutDir {
    /// Wraps the flag value, creating the directory eagerly so a bad path
    /// fails before any computation starts.
    pub fn new(path: Option<PathBuf>) -> Result<Self> {
        if let Some(dir) = &path {
            fs::create_dir_all(dir)
                .with_context(|| format!("cannot create `{}`", dir.display()))?;
        }
        Ok(OutDir(path))
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Result<()> {
        if let Some(dir) = &self.0 {
            let path = dir.join(name);
            fs::write(&path, bytes)
                .with_context(|| format!("cannot write `{}`", path.display()))?;
        }
        Ok(())
    }

    /// Writes `<stem>.json` with a trailing newline.
    pub fn write_json<T: Serialize>(&self, stem: &str, value: &T) -> Result<()> {
        if self.0.is_none() {
            return Ok(());
        }
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(&format!("{stem}.json"), text.as_bytes())
    }

    /// Writes a plain-text artifact verbatim.
    pub fn write_text(&self, name: &str, text: &str) -> Result<()> {
        self.write(name, text.as_bytes())
    }

    /// Writes `<stem>.csv` from a header and stringified rows.
    pub fn write_csv(&self, stem: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        if self.0.is_none() {
            return Ok(());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().context("csv buffer")?;
        self.write(&format!("{stem}.csv"), &bytes)
    }
}

/// Renders an optional count as text, with `-` for absent values.
pub fn opt(value: Option<u32>) -> String {
    value.map_or_else(|| "-".to_string(), |v| v.to_string())
}
