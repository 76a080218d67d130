//! Run manifests: what a run read and wrote, with content hashes, so the
//! run can be repeated and its outputs compared byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL: &str = "alphactl";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileHash {
    pub fn of(path: &Path) -> Result<FileHash> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(FileHash {
            path: path.to_path_buf(),
            sha256: sha256_hex(&bytes),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Subcommand path, e.g. `net run`.
    pub command: String,
    /// Arguments after the program name, without `--out-dir`.
    pub args: Vec<String>,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
    pub fuel: Option<u64>,
    pub rounds: Option<u64>,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
    pub stdout_sha256: String,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<RunManifest> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifests serialize");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `args` with every `--out-dir` option removed.
pub fn strip_out_dir(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out-dir" {
            skip = true;
            continue;
        }
        if a.starts_with("--out-dir=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn out_dir_is_dropped() {
        let args: Vec<String> = ["--out-dir", "x", "net", "run", "--out-dir=y", "--rounds", "3"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(strip_out_dir(&args), vec!["net", "run", "--rounds", "3"]);
    }
}
