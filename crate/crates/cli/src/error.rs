use std::path::{Path, PathBuf};

use serde_json::json;
use shadowlab_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 4,
            CliError::Core(e) => match e {
                CoreError::NonConvergence { .. }
                | CoreError::OrbitStabilizerMismatch { .. }
                | CoreError::RankDeficient { .. } => 3,
                _ => 2,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Core(e) => match e {
                CoreError::NonConvergence { .. } => "non_convergence",
                CoreError::OrbitStabilizerMismatch { .. } => "orbit_stabilizer_mismatch",
                CoreError::RankDeficient { .. } => "rank_deficient",
                CoreError::UnknownBody(_) => "unknown_body",
                CoreError::BadParams(_) => "bad_params",
                CoreError::Parse(_) => "parse",
                CoreError::ModeUnsupported(_) => "mode_unsupported",
                CoreError::Degenerate { .. } => "degenerate",
                _ => "invalid_input",
            },
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
    }
}
