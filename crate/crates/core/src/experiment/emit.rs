use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ExperimentConfig;
use crate::error::Result;

/// A CSV table: header plus preformatted cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("cells are UTF-8"))
    }
}

/// Shortest round-trip scientific notation.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:e}")
    }
}

pub(crate) fn format_opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub rows: usize,
}

/// Record of one run, written next to its CSV files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub threads: Option<usize>,
    pub config: ExperimentConfig,
    pub files: Vec<FileEntry>,
    /// Hash over the hashes of every emitted file, in order.
    pub content_hash: String,
    pub runtime_secs: f64,
}

/// Writes every table as `<name>.csv` and every extra document as
/// `<name>.json` under `dir`, then `manifest.json`.
pub fn emit(
    command: &str,
    cfg: &ExperimentConfig,
    tables: &[Table],
    extras: &[(String, serde_json::Value)],
    dir: &Path,
    runtime_secs: f64,
) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for t in tables {
        let text = t.to_csv()?;
        let name = format!("{}.csv", t.name);
        fs::write(dir.join(&name), &text)?;
        files.push(FileEntry {
            path: name,
            sha256: sha256_hex(text.as_bytes()),
            rows: t.rows.len(),
        });
    }
    for (stem, value) in extras {
        let text = serde_json::to_string_pretty(value)?;
        let name = format!("{stem}.json");
        fs::write(dir.join(&name), &text)?;
        files.push(FileEntry {
            path: name,
            sha256: sha256_hex(text.as_bytes()),
            rows: 0,
        });
    }
    let joined: String = files.iter().map(|f| f.sha256.as_str()).collect();
    let manifest = Manifest {
        command: command.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: cfg.seed,
        threads: cfg.threads,
        config: cfg.clone(),
        content_hash: sha256_hex(joined.as_bytes()),
        files,
        runtime_secs,
    };
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(manifest)
}
