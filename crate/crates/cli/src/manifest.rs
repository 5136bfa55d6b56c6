//! Output directories and run manifests.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use muskat::io::write_atomic;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Overrides the directory that relative output paths resolve against.
pub const OUTPUT_ROOT_ENV: &str = "MUSKAT_OUTPUT_ROOT";

pub const MANIFEST_FILE: &str = "manifest.json";

/// `dir` under the output root. With the override set, absolute paths are
/// re-rooted under it.
pub fn resolve_output(dir: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if !root.is_empty() => {
            let rel: PathBuf = dir
                .components()
                .filter(|c| matches!(c, std::path::Component::Normal(_) | std::path::Component::ParentDir))
                .collect();
            PathBuf::from(root).join(rel)
        }
        _ => dir.to_path_buf(),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Collects the artifacts of one command and writes the manifest last.
#[derive(Debug)]
pub struct RunManifest {
    dir: PathBuf,
    command: String,
    config: Value,
    config_hash: String,
    started_ms: u128,
    files: Vec<FileEntry>,
    extra: serde_json::Map<String, Value>,
}

impl RunManifest {
    /// `config_bytes` is echoed verbatim when it is valid JSON, as a string
    /// otherwise.
    pub fn new(dir: PathBuf, command: &str, config_bytes: &[u8]) -> Self {
        let config = serde_json::from_slice(config_bytes)
            .unwrap_or_else(|_| Value::String(String::from_utf8_lossy(config_bytes).into_owned()));
        Self {
            dir,
            command: command.into(),
            config,
            config_hash: sha256_hex(config_bytes),
            started_ms: now_ms(),
            files: Vec::new(),
            extra: serde_json::Map::new(),
        }
    }

    pub fn set(&mut self, key: &str, v: impl Serialize) {
        self.extra.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    /// Writes `bytes` to `<dir>/<rel>` atomically and records its hash.
    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(rel);
        write_atomic(&path, bytes).map_err(|e| io_err(&path, e))?;
        self.record(rel, bytes);
        Ok(())
    }

    /// Hashes a file some other component already wrote.
    pub fn adopt(&mut self, path: &Path) -> Result<(), CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        let rel = path.strip_prefix(&self.dir).unwrap_or(path).to_string_lossy().into_owned();
        self.record(&rel, &bytes);
        Ok(())
    }

    fn record(&mut self, rel: &str, bytes: &[u8]) {
        self.files.retain(|f| f.path != rel);
        self.files.push(FileEntry {
            path: rel.into(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
    }

    /// Writes `manifest.json` with the final status.
    pub fn finish(mut self, status: &str) -> Result<PathBuf, CliError> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let mut doc = json!({
            "command": self.command,
            "code_version": env!("CARGO_PKG_VERSION"),
            "config": self.config,
            "config_sha256": self.config_hash,
            "started_unix_ms": self.started_ms as u64,
            "finished_unix_ms": now_ms() as u64,
            "status": status,
            "files": self.files,
        });
        if let Value::Object(m) = &mut doc {
            m.extend(self.extra);
        }
        let bytes = serde_json::to_vec_pretty(&doc).expect("manifest serializes");
        let path = self.dir.join(MANIFEST_FILE);
        write_atomic(&path, &bytes).map_err(|e| io_err(&path, e))?;
        Ok(path)
    }
}

fn io_err(path: &Path, e: muskat::Error) -> CliError {
    match e {
        muskat::Error::Io(io) => CliError::io(format!("writing {}", path.display()), io),
        other => CliError::from(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_tracks_every_byte() {
        let a = sha256_hex(b"{\"a\": 1}");
        assert_ne!(a, sha256_hex(b"{\"a\": 1} "));
        assert_eq!(a, sha256_hex(b"{\"a\": 1}"));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn manifest_lists_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new(dir.path().to_path_buf(), "solve", b"{}");
        m.write("x.csv", b"1,2\n").unwrap();
        m.write("x.csv", b"3,4\n").unwrap();
        m.set("nu", 0.5);
        let p = m.finish("finished").unwrap();
        let v: Value = serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap();
        assert_eq!(v["files"].as_array().unwrap().len(), 1);
        assert_eq!(v["files"][0]["sha256"], sha256_hex(b"3,4\n"));
        assert_eq!(v["nu"], 0.5);
        assert_eq!(v["config"], json!({}));
    }
}
