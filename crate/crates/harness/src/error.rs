use std::path::PathBuf;

use ess_core::EssError;
use ess_elliptic::EllipticError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("bad magic {found:?} at byte 0 (expected \"ESSC\")")]
    MagicMismatch { found: [u8; 4] },

    #[error("unsupported chain file version {found} at byte 4")]
    VersionMismatch { found: u32 },

    #[error("truncated chain file: expected {expected} bytes, found {found} (data ends at byte {found})")]
    Truncated { expected: u64, found: u64 },

    #[error("malformed file at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("chain {chain} failed at iteration {iteration}: {source}")]
    Mcmc {
        chain: usize,
        iteration: u64,
        #[source]
        source: EllipticError,
    },

    #[error(transparent)]
    Estimator(#[from] EssError),

    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarnessError {
    let path = path.into();
    move |source| HarnessError::Io { path, source }
}
