//! Run directories: atomic artifact writes and the manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// File name of the manifest in every run directory.
pub const MANIFEST: &str = "manifest.json";

/// Name of the tool recorded in manifests.
pub const TOOL: &str = "qal";

/// State of a run as recorded in its manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunState {
    /// The run has started and not finished.
    Running,
    /// The run finished and every check passed.
    Ok,
    /// The run finished and some exact or oracle check failed.
    VerificationFailed,
    /// The run stopped early; its artifacts are partial.
    Incomplete,
    /// The run failed with an error.
    Error,
}

/// One file written by a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Path relative to the run directory.
    pub path: String,
    /// Lowercase hex SHA-256 of the contents.
    pub sha256: String,
    /// Size in bytes.
    pub bytes: u64,
}

/// The record of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// Tool name.
    pub tool: String,
    /// Tool version.
    pub version: String,
    /// Subcommand that produced the run.
    pub subcommand: String,
    /// Every parameter after merging defaults, the config file and flags.
    pub config: serde_json::Value,
    /// How the run ended.
    pub status: RunState,
    /// Whether every artifact is final.
    pub complete: bool,
    /// Failures, early stops and warnings.
    pub notes: Vec<String>,
    /// Files written, in write order.
    pub artifacts: Vec<Artifact>,
}

/// An output directory being filled by one run.
#[derive(Debug)]
pub struct RunDir {
    root: PathBuf,
    manifest: Manifest,
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

impl RunDir {
    /// Creates the directory, removes the artifacts of an earlier manifest
    /// found there, and writes a manifest in the `running` state.
    pub fn create(root: &Path, subcommand: &str, config: serde_json::Value) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        if let Ok(text) = fs::read_to_string(root.join(MANIFEST)) {
            if let Ok(old) = serde_json::from_str::<Manifest>(&text) {
                for a in old.artifacts {
                    let path = root.join(&a.path);
                    if path.parent() == Some(root) {
                        let _ = fs::remove_file(path);
                    }
                }
            }
        }
        let dir = Self {
            root: root.to_path_buf(),
            manifest: Manifest {
                tool: TOOL.to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                subcommand: subcommand.to_string(),
                config,
                status: RunState::Running,
                complete: false,
                notes: Vec::new(),
                artifacts: Vec::new(),
            },
        };
        dir.flush()?;
        Ok(dir)
    }

    /// The directory.
    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Writes an artifact atomically and records its hash.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        if name == MANIFEST || name.contains(['/', '\\']) {
            return Err(CliError::Runtime(format!("invalid artifact name {name:?}")));
        }
        write_atomic(&self.root.join(name), bytes)?;
        let artifact = Artifact {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len() as u64,
        };
        match self.manifest.artifacts.iter_mut().find(|a| a.path == name) {
            Some(slot) => *slot = artifact,
            None => self.manifest.artifacts.push(artifact),
        }
        self.flush()
    }

    /// Writes a pretty JSON artifact.
    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.write(name, &json_bytes(value)?)
    }

    /// Writes a CSV artifact from a header and string records.
    pub fn write_csv<R, I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), CliError>
    where
        R: IntoIterator,
        R::Item: AsRef<[u8]>,
        I: IntoIterator<Item = R>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Runtime(e.to_string());
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
        self.write(name, &bytes)
    }

    /// Adds a note to the manifest.
    pub fn note(&mut self, note: impl Into<String>) {
        self.manifest.notes.push(note.into());
    }

    /// Records the final state and rewrites the manifest.
    pub fn finish(mut self, status: RunState) -> Result<Manifest, CliError> {
        self.manifest.status = status;
        self.manifest.complete = matches!(status, RunState::Ok | RunState::VerificationFailed);
        self.flush()?;
        Ok(self.manifest)
    }

    fn flush(&self) -> Result<(), CliError> {
        write_atomic(&self.root.join(MANIFEST), &json_bytes(&self.manifest)?)
    }
}

/// Formats a float in its shortest round-trip form.
pub fn num(x: f64) -> String {
    format!("{x}")
}
