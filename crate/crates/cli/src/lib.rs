//! File formats, subcommands, SVG rendering and reports for the `islands`
//! binary.

#![allow(clippy::result_large_err)]

pub mod commands;
pub mod format;
pub mod render;
pub mod report;
pub mod solution;

use std::path::PathBuf;

use islands::algos::AlgoError;
use islands::arrangement::ArrangementError;
use islands::generators::GenError;
use islands::island::IslandError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Island(#[from] IslandError),
    #[error(transparent)]
    Algo(#[from] AlgoError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{0}")]
    Usage(String),
}

impl From<ArrangementError> for CliError {
    fn from(e: ArrangementError) -> Self {
        CliError::Algo(AlgoError::Arrangement(e))
    }
}

impl CliError {
    /// 0 success, 2 validation failure, 3 size limit, 4 degeneracy, 1 other.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Island(e) | CliError::Algo(AlgoError::Island(e)) => island_code(e),
            CliError::Gen(GenError::Island(e)) => island_code(e),
            CliError::Algo(AlgoError::Arrangement(ArrangementError::BoundExceeded { .. })) => 2,
            CliError::Algo(AlgoError::Arrangement(_)) => 4,
            CliError::Algo(AlgoError::NonGenericLine(..)) => 4,
            CliError::Algo(AlgoError::CoverageHole(_) | AlgoError::NotSeparating(_)) => 2,
            _ => 1,
        }
    }
}

fn island_code(e: &IslandError) -> i32 {
    match e {
        IslandError::OracleSizeLimit { .. } => 3,
        _ => 1,
    }
}

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}
