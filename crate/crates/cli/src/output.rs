//! Writing artifacts and the run manifest.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::RunError;
use crate::run::Artifact;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: serde_json::Value,
    pub config_sha256: String,
    pub files: Vec<FileEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Manifest {
    pub fn new(command: &str, inputs: serde_json::Value, artifacts: &[Artifact]) -> Self {
        let compact = serde_json::to_vec(&inputs).expect("JSON values serialize");
        let files = artifacts
            .iter()
            .map(|a| FileEntry { name: a.name.clone(), sha256: sha256_hex(&a.table.to_csv_bytes()), rows: a.table.rows.len() })
            .collect();
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            inputs,
            config_sha256: sha256_hex(&compact),
            files,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.display().to_string(), source }
}

/// Writes every artifact and `manifest.json` into `dir`, creating it if needed.
pub fn write_dir(dir: &Path, manifest: &Manifest, artifacts: &[Artifact]) -> Result<(), RunError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    for a in artifacts {
        let path = dir.join(&a.name);
        std::fs::write(&path, a.table.to_csv_bytes()).map_err(io_err(&path))?;
    }
    let path = dir.join(MANIFEST_NAME);
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(&path, text).map_err(io_err(&path))
}

/// CSV on `out`; several artifacts are separated by `# name` lines.
pub fn write_stream(out: &mut dyn Write, artifacts: &[Artifact]) -> Result<(), RunError> {
    let stdout = Path::new("<stdout>");
    let many = artifacts.len() > 1;
    for a in artifacts {
        if many {
            writeln!(out, "# {}", a.name).map_err(io_err(stdout))?;
        }
        out.write_all(&a.table.to_csv_bytes()).map_err(io_err(stdout))?;
    }
    out.flush().map_err(io_err(stdout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Table;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn manifest_lists_files() {
        let mut t = Table::new(&["x"]);
        t.push(vec![1.0.into()]);
        let arts = [Artifact::new("a.csv", t)];
        let m = Manifest::new("sweep", serde_json::json!({"k": 1}), &arts);
        assert_eq!(m.files[0].rows, 1);
        assert_eq!(m.config_sha256, sha256_hex(br#"{"k":1}"#));
        let dir = tempfile::tempdir().unwrap();
        write_dir(dir.path(), &m, &arts).unwrap();
        assert!(dir.path().join(MANIFEST_NAME).exists());
        assert_eq!(std::fs::read(dir.path().join("a.csv")).unwrap(), arts[0].table.to_csv_bytes());
    }
}
