//! Table serialization: CSV and JSON documents, written atomically.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::config::{RunConfig, SCHEMA_VERSION};

/// Formats a float with 17 significant digits (round-trip exact for f64).
pub fn fmt_float(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.16e}")
}

/// Writes via a temporary sibling file and a final rename.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = Path::new(&tmp);
    fs::write(tmp_path, contents)?;
    fs::rename(tmp_path, path)
}

/// A CSV table with a fixed header.
pub struct CsvTable {
    buffer: String,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            buffer: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buffer.push_str(&fields.join(","));
        self.buffer.push('\n');
    }

    pub fn contents(&self) -> &str {
        &self.buffer
    }
}

#[derive(Serialize)]
pub struct JsonDocument<'a, T: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub results: T,
}

pub fn write_json<T: Serialize>(
    path: &Path,
    command: &str,
    config: &RunConfig,
    results: T,
) -> io::Result<()> {
    let doc = JsonDocument {
        schema_version: SCHEMA_VERSION,
        command,
        config,
        results,
    };
    let mut body = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
    body.push('\n');
    write_atomic(path, &body)
}
