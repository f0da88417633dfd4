//! Deterministic output files and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Collects the files written by one command and records them in
/// `manifest.json`.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    command: &'a str,
    seed: u64,
    config_sha256: String,
    details: serde_json::Value,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_path_buf(), files: vec![] })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.root.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes through a callback that fills a byte buffer.
    pub fn write_with<F>(&mut self, name: &str, fill: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    {
        let mut buf = Vec::new();
        fill(&mut buf).map_err(|e| CliError::io(self.root.join(name), e))?;
        self.write(name, &buf)
    }

    pub fn finish(mut self, command: &str, seed: u64, config: &[u8], details: serde_json::Value) -> Result<(), CliError> {
        self.files.sort();
        let manifest = Manifest {
            tool: "tvstable",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config_sha256: hex(&Sha256::digest(config)),
            details,
            files: self.files.clone(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Internal(e.to_string()))?;
        text.push('\n');
        let path = self.root.join("manifest.json");
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Single-column CSV with a `value` header.
pub fn series_csv(values: &[f64]) -> Vec<u8> {
    let mut out = String::from("value\n");
    for v in values {
        out.push_str(&format!("{v}\n"));
    }
    out.into_bytes()
}

/// Reads the first column of a CSV file with a header row.
pub fn read_series(path: &Path) -> Result<Vec<f64>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            other => CliError::Validation(format!("{}: {other:?}", path.display())),
        })?;
    let mut values = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let field = rec.get(0).unwrap_or("").trim();
        let v: f64 = field
            .parse()
            .map_err(|_| CliError::Validation(format!("{}: row {}: {field:?} is not a number", path.display(), i + 2)))?;
        if !v.is_finite() {
            return Err(CliError::Validation(format!("{}: row {}: non-finite value", path.display(), i + 2)));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::Validation(format!("{}: no observations", path.display())));
    }
    Ok(values)
}
