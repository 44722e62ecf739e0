//! Scene ingestion, experiment orchestration and reporting for
//! `schottky-lab`.
//!
//! Every command returns an [`Outcome`]: an exit code and a list of
//! artifacts (CSV tables, JSON summaries, SVG renders). Artifact contents
//! depend only on the scene and the flags; the wall-clock time goes into a
//! separate `run_metadata.json`.

pub mod canonical;
pub mod commands;
pub mod render;
pub mod scene;

use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "SCHOTTKY_LAB_THREADS";

pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const VALIDATION: u8 = 1;
    pub const RUNTIME: u8 = 2;
    pub const USAGE: u8 = 3;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("evaluation failed: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Validation(_) => exit::VALIDATION,
            CliError::Runtime(_) => exit::RUNTIME,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub format: Format,
    pub content: String,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: String,
    pub scene_hash: String,
    pub exit_code: u8,
    pub artifacts: Vec<Artifact>,
    /// Human-readable notes for stderr.
    pub messages: Vec<String>,
}

impl Outcome {
    pub fn artifact(&self, format: Format) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.format == format)
    }

    pub fn file_name(&self, format: Format) -> String {
        format!("{}.{}", self.command.replace(' ', "_"), format.extension())
    }
}

/// Writes `outcome` into `dir` (all artifacts, or only `format`) together
/// with `run_metadata.json`; returns the written paths.
pub fn write_bundle(outcome: &Outcome, dir: &Path, format: Option<Format>) -> Result<Vec<PathBuf>, CliError> {
    let selected: Vec<&Artifact> = match format {
        Some(f) => vec![outcome.artifact(f).ok_or_else(|| unavailable(outcome, f))?],
        None => outcome.artifacts.iter().collect(),
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for a in selected {
        let path = dir.join(outcome.file_name(a.format));
        std::fs::write(&path, &a.content).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    let path = dir.join("run_metadata.json");
    std::fs::write(&path, run_metadata(outcome)).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    written.push(path);
    Ok(written)
}

/// The artifact printed when no output directory is given.
pub fn stdout_artifact(outcome: &Outcome, format: Option<Format>) -> Result<&Artifact, CliError> {
    let f = format.unwrap_or(Format::Json);
    outcome.artifact(f).ok_or_else(|| unavailable(outcome, f))
}

fn unavailable(outcome: &Outcome, f: Format) -> CliError {
    CliError::Usage(format!("{} has no {} output", outcome.command, f.extension()))
}

fn run_metadata(outcome: &Outcome) -> String {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    canonical::pretty(&json!({
        "tool": "schottky-lab",
        "tool_version": TOOL_VERSION,
        "command": outcome.command,
        "scene_hash": outcome.scene_hash,
        "exit_code": outcome.exit_code,
        "unix_time": now,
        "threads": rayon::current_num_threads(),
    }))
}

/// Configures the global thread pool from [`THREADS_ENV`].
pub fn init_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))
}
