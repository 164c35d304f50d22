//! Command-line harness: scenario files, traces, reports and exports.

pub mod commands;
pub mod export;
pub mod report;
pub mod scenario_file;
pub mod trace_file;

use std::path::PathBuf;

use explore_core::link::LinkError;
use explore_core::sim::SimError;
use thiserror::Error;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "EXPLORE_OUT";

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// Run ended in an outcome other than the expected one.
    pub const UNEXPECTED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const COLLISION: i32 = 3;
    pub const MISMATCH: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", scenario_message(*line, message))]
    Scenario { line: Option<usize>, message: String },
    #[error("trace line {line}: {message}")]
    Trace { line: usize, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("link: {0}")]
    Link(#[from] LinkError),
    #[error("{0}")]
    Range(String),
    #[error("{0}")]
    Usage(String),
}

fn scenario_message(line: Option<usize>, message: &str) -> String {
    match line {
        Some(l) => format!("scenario line {l}: {message}"),
        None => format!("scenario: {message}"),
    }
}

impl CliError {
    /// Every error is a problem with the inputs; outcomes and mismatches
    /// are reported through [`commands`] instead.
    pub fn exit_code(&self) -> i32 {
        exit::CONFIG
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}
