//! The command pipeline: each stage reads its inputs and upstream
//! artifacts, writes header-stamped outputs plus a manifest, and never
//! touches another stage's files.

pub mod cli;
mod commands;
mod config;

pub use commands::{run_all, run_command, Command, CommandReport, Pipeline};
pub use config::{
    CompareConfig, CompareMode, MatchingConfig, Overrides, Paths, RegressionConfig, RunConfig, ScoringConfig,
    SentimentConfig, ServiceConfig, Unit,
};

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("missing upstream artifact {}", .0.display())]
    MissingArtifact(PathBuf),
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Failed(String),
}

impl PipelineError {
    /// 2 for a missing upstream artifact, 3 for invalid input or
    /// configuration, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::MissingArtifact(_) => 2,
            PipelineError::Validation(_) => 3,
            PipelineError::Io { .. } | PipelineError::Failed(_) => 1,
        }
    }

    /// Machine-readable form printed on stderr by the CLI.
    pub fn diagnostics(&self) -> serde_json::Value {
        match self {
            PipelineError::MissingArtifact(p) => serde_json::json!({
                "error": "missing_artifact",
                "path": p.display().to_string(),
            }),
            PipelineError::Validation(problems) => serde_json::json!({
                "error": "validation",
                "diagnostics": problems,
            }),
            other => serde_json::json!({ "error": "failure", "message": other.to_string() }),
        }
    }
}

/// Input or upstream problems surface as validation failures.
pub(crate) fn invalid(e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Validation(vec![e.to_string()])
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Header line that opens every text output.
pub fn header_line(config_hash: &str, seed: u64) -> String {
    format!("# pnc-eval v{VERSION} config={config_hash} seed={seed}")
}

#[derive(Serialize)]
struct JsonDocument<'a, T: Serialize> {
    header: &'a str,
    data: &'a T,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    config_hash: &'a str,
    inputs: &'a [FileDigest],
    outputs: &'a [FileDigest],
}

/// Collects one command's outputs and input digests, then writes the
/// manifest.
pub(crate) struct OutputSet<'a> {
    dir: &'a Path,
    header: String,
    seed: u64,
    config_hash: String,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

impl<'a> OutputSet<'a> {
    pub fn new(dir: &'a Path, config_hash: &str, seed: u64) -> Self {
        OutputSet {
            dir,
            header: header_line(config_hash, seed),
            seed,
            config_hash: config_hash.to_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Records an input's digest under `label` (its path as configured, or
    /// the artifact name).
    pub fn input(&mut self, label: &str, path: &Path) -> Result<(), PipelineError> {
        let bytes = fs::read(path).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.inputs.push(FileDigest {
            path: label.to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    fn write_bytes(&mut self, name: &str, bytes: Vec<u8>) -> Result<(), PipelineError> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| PipelineError::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
        fs::write(&path, &bytes).map_err(|source| PipelineError::Io { path, source })?;
        self.outputs.push(FileDigest {
            path: name.to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    /// Writes a text output (CSV, JSONL, plain text) after the header line.
    pub fn text(&mut self, name: &str, body: &[u8]) -> Result<(), PipelineError> {
        let mut bytes = Vec::with_capacity(body.len() + 64);
        bytes.extend_from_slice(self.header.as_bytes());
        bytes.push(b'\n');
        bytes.extend_from_slice(body);
        self.write_bytes(name, bytes)
    }

    /// Writes `{"header": ..., "data": ...}` as pretty JSON.
    pub fn json<T: Serialize>(&mut self, name: &str, data: &T) -> Result<(), PipelineError> {
        let doc = JsonDocument {
            header: &self.header,
            data,
        };
        let mut bytes = serde_json::to_vec_pretty(&doc).map_err(invalid)?;
        bytes.push(b'\n');
        self.write_bytes(name, bytes)
    }

    pub fn finish(mut self, command: &str) -> Result<Vec<String>, PipelineError> {
        let config_hash = self.config_hash.clone();
        let inputs = std::mem::take(&mut self.inputs);
        let outputs = std::mem::take(&mut self.outputs);
        let manifest = Manifest {
            command,
            version: VERSION,
            seed: self.seed,
            config_hash: &config_hash,
            inputs: &inputs,
            outputs: &outputs,
        };
        let mut names: Vec<String> = outputs.iter().map(|o| o.path.clone()).collect();
        let manifest_name = format!("manifest_{command}.json");
        self.json(&manifest_name, &manifest)?;
        names.push(manifest_name);
        Ok(names)
    }
}

/// Body of a header-stamped text artifact (everything after line one).
pub(crate) fn strip_header(bytes: &[u8]) -> &[u8] {
    if bytes.starts_with(b"# pnc-eval") {
        match bytes.iter().position(|b| *b == b'\n') {
            Some(i) => &bytes[i + 1..],
            None => &[],
        }
    } else {
        bytes
    }
}
