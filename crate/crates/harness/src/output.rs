//! File writing shared by the subcommands.

use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{io_err, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

#[derive(Serialize)]
struct Metadata<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a ExperimentConfig,
    details: &'a T,
}

/// `metadata.json`: the resolved config and command. Nothing run-specific
/// such as timings or thread counts, so reruns stay byte-identical.
pub fn write_metadata<T: Serialize>(dir: &Path, cfg: &ExperimentConfig, command: &str, details: &T) -> Result<()> {
    write_json(
        &dir.join("metadata.json"),
        &Metadata {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: cfg,
            details,
        },
    )
}

/// Row-major grid, one line per `j` from bottom to top.
pub fn grid_to_csv(values: &[f64], nx: usize) -> String {
    let mut out = String::new();
    for row in values.chunks(nx) {
        let cells: Vec<String> = row.iter().map(|&v| crate::rows::fmt_f64(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
