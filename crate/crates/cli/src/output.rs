use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::failure::{CliResult, Failure};

/// Human-readable output on stdout, silenced by `--quiet`.
pub struct Printer {
    pub quiet: bool,
}

impl Printer {
    pub fn line(&self, text: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", text.as_ref());
        }
    }
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::usage(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    for row in rows {
        w.serialize(row).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| Failure::io(path, e))
}
