//! Run manifests written next to command outputs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

/// What ran, on which inputs, producing which files.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    /// Effective settings as `key = value` pairs.
    pub config: Vec<(String, String)>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    /// Input paths with their SHA-256 digests.
    pub inputs: Vec<(PathBuf, String)>,
    pub outputs: Vec<PathBuf>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            config: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.config.push((key.to_string(), value.to_string()));
    }

    pub fn add_input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push((path.to_path_buf(), sha256_hex(bytes)));
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tetrapack-manifest v1");
        let _ = writeln!(s, "command {}", self.command);
        let _ = writeln!(s, "version {}", self.version);
        let _ = writeln!(s, "timestamp {}", self.timestamp);
        for (k, v) in &self.config {
            let _ = writeln!(s, "config.{k} {v}");
        }
        for (p, h) in &self.inputs {
            let _ = writeln!(s, "input {} sha256={h}", p.display());
        }
        for p in &self.outputs {
            let _ = writeln!(s, "output {}", p.display());
        }
        s
    }

    /// Writes the manifest to `path` after checking that every listed
    /// output exists and is non-empty.
    pub fn write(&self, path: &Path) -> Result<()> {
        for p in &self.outputs {
            let len = fs::metadata(p).with_context(|| format!("output {} is missing", p.display()))?.len();
            if len == 0 {
                bail!("output {} is empty", p.display());
            }
        }
        fs::write(path, self.render()).with_context(|| format!("writing {}", path.display()))
    }
}

/// Manifest path for an output file: `<out>.manifest`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn refuses_missing_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new("optimize");
        m.outputs.push(dir.path().join("nope.txt"));
        assert!(m.write(&dir.path().join("m")).is_err());
        fs::write(dir.path().join("nope.txt"), "x").unwrap();
        m.write(&dir.path().join("m")).unwrap();
        let text = fs::read_to_string(dir.path().join("m")).unwrap();
        assert!(text.starts_with("tetrapack-manifest v1\ncommand optimize\n"));
    }
}
