//! Result envelope and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableInfo {
    pub path: String,
    pub header: Vec<String>,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub command: String,
    pub version: String,
    /// Resolved config with command-line overrides applied; rerunning it
    /// reproduces the table.
    pub config: String,
    pub wall_time_s: f64,
    pub table: TableInfo,
    pub payload: serde_json::Value,
    pub notes: Vec<String>,
}

impl ResultEnvelope {
    pub fn to_json(&self) -> Result<Vec<u8>, CliError> {
        let mut bytes = serde_json::to_vec_pretty(self).map_err(|e| CliError::config(e.to_string()))?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, CliError> {
        serde_json::from_slice(bytes).map_err(|e| CliError::config(format!("envelope: {e}")))
    }
}

/// Envelope path for a table written to `out`.
pub fn envelope_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes every file to a temporary sibling first and renames only after all
/// of them are complete.
pub fn write_atomically(files: &[(&Path, &[u8])]) -> Result<(), CliError> {
    let io = |path: &Path, e: std::io::Error| CliError::config(format!("cannot write {}: {e}", path.display()));
    let mut staged = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io(path, e))?;
        tmp.write_all(bytes).map_err(|e| io(path, e))?;
        tmp.as_file().sync_all().map_err(|e| io(path, e))?;
        staged.push((tmp, *path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).map_err(|e| io(path, e.error))?;
    }
    Ok(())
}
