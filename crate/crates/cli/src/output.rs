//! CSV tables and run manifests.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ConfigFile;
use crate::CliError;

/// A CSV table with a header row. Floats are written in Rust's shortest
/// round-trip form, so re-reading and re-writing a table is lossless.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
    }

    pub fn from_csv(text: &str) -> Result<Self, csv::Error> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<_, _>>()?;
        Ok(Self { header, rows })
    }

    /// Column `name` parsed as floats.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        self.rows.iter().map(|r| r[i].parse().ok()).collect()
    }
}

/// Formats a float for CSV output.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// One emitted file, with its digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    pub sha256: String,
    pub rows: usize,
}

/// Writes `table` as `dir/name`.
pub fn write_table(dir: &Path, name: &str, table: &Table) -> Result<OutputFile, CliError> {
    let text = table.to_csv();
    let path = dir.join(name);
    std::fs::write(&path, &text).map_err(|e| CliError::Io {
        context: format!("writing {}", path.display()),
        source: e,
    })?;
    Ok(OutputFile {
        name: name.to_string(),
        sha256: hex::encode(Sha256::digest(text.as_bytes())),
        rows: table.rows.len(),
    })
}

/// Everything needed to reproduce a run. Passing the manifest back as
/// `--config` replays the run with identical CSV output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub recipe: Option<String>,
    pub base_seed: u64,
    pub threads: usize,
    pub runtime_s: f64,
    pub config_hash: String,
    pub config: ConfigFile,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn new(command: &str, recipe: Option<&str>, config: &ConfigFile) -> Self {
        Self {
            tool: "multiris".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            recipe: recipe.map(str::to_string),
            base_seed: config.sweep.seed,
            threads: rayon::current_num_threads(),
            runtime_s: 0.0,
            config_hash: config.content_hash(),
            config: config.clone(),
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|e| CliError::Io {
            context: format!("writing {}", path.display()),
            source: e,
        })?;
        Ok(path)
    }
}
