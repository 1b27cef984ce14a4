//! Report files.

use std::fs;
use std::path::{Path, PathBuf};

use bsshell_core::solver::IterationRecord;
use serde::Serialize;

use crate::CliError;

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Compute(format!("cannot write {}: {e}", path.display()))
}

/// Writes `value` as pretty JSON to `dir/name`, creating `dir` if needed.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_error(&path, e))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| io_error(&path, e))?;
    Ok(path)
}

/// Convergence history with the columns `iter, energy, grad_inf, step`.
pub fn write_history(
    dir: &Path,
    name: &str,
    history: &[IterationRecord],
) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_error(&path, e))?;
    w.write_record(["iter", "energy", "grad_inf", "step"])
        .map_err(|e| io_error(&path, e))?;
    for r in history {
        w.write_record([
            r.iter.to_string(),
            format!("{:e}", r.energy),
            format!("{:e}", r.grad_inf),
            format!("{:e}", r.step),
        ])
        .map_err(|e| io_error(&path, e))?;
    }
    w.flush().map_err(|e| io_error(&path, e))?;
    Ok(path)
}
