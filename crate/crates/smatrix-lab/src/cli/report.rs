//! Machine-readable experiment reports.
//!
//! `report.json` carries every scalar result with a provenance tag and an
//! echo of the configuration; keys are emitted in sorted order so two runs
//! with the same config and seed produce identical bytes except for the
//! timestamp field. Plot-ready tables go to CSV side files with 12
//! significant digits.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::CliError;

/// Where a reported number came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prov {
    ClosedForm,
    Quadrature,
    Eigensolver,
    Oracle,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
enum Value {
    Number(f64),
    Count(u64),
    Flag(bool),
}

#[derive(Debug, Clone, Serialize)]
struct Entry {
    provenance: Prov,
    value: Value,
}

/// Accumulates results and writes `report.json`.
#[derive(Debug, Serialize)]
pub struct Report {
    experiment: String,
    tool_version: String,
    timestamp: String,
    config: BTreeMap<String, String>,
    results: BTreeMap<String, Entry>,
    notes: BTreeMap<String, String>,
}

impl Report {
    pub fn new(experiment: &str, config_echo: BTreeMap<String, String>) -> Self {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .expect("clock after epoch");
        Report {
            experiment: experiment.to_string(),
            tool_version: format!("{}+kn-1", env!("CARGO_PKG_VERSION")),
            timestamp: format!("{}.{:09}", now.as_secs(), now.subsec_nanos()),
            config: config_echo,
            results: BTreeMap::new(),
            notes: BTreeMap::new(),
        }
    }

    pub fn scalar(&mut self, name: &str, value: f64, prov: Prov) {
        self.results.insert(
            name.to_string(),
            Entry {
                provenance: prov,
                value: Value::Number(value),
            },
        );
    }

    pub fn count(&mut self, name: &str, value: u64, prov: Prov) {
        self.results.insert(
            name.to_string(),
            Entry {
                provenance: prov,
                value: Value::Count(value),
            },
        );
    }

    pub fn flag(&mut self, name: &str, value: bool, prov: Prov) {
        self.results.insert(
            name.to_string(),
            Entry {
                provenance: prov,
                value: Value::Flag(value),
            },
        );
    }

    pub fn note(&mut self, name: &str, text: &str) {
        self.notes.insert(name.to_string(), text.to_string());
    }

    pub fn get_scalar(&self, name: &str) -> Option<f64> {
        match self.results.get(name) {
            Some(Entry {
                value: Value::Number(v),
                ..
            }) => Some(*v),
            Some(Entry {
                value: Value::Count(c),
                ..
            }) => Some(*c as f64),
            _ => None,
        }
    }

    /// Write `report.json` into `dir` and return its path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Config(format!("output_dir not writable: {e}")))?;
        let path = dir.join("report.json");
        let body = serde_json::to_string_pretty(self).expect("report serializes");
        std::fs::write(&path, body.as_bytes())
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

/// Format with 12 significant digits (scientific), the CSV contract.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Write a CSV file with a header row.
pub fn write_csv(
    path: &Path,
    header: &str,
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Config(format!("output_dir not writable: {e}")))?;
    }
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(file);
    let emit = || -> std::io::Result<()> {
        writeln!(w, "{header}")?;
        for row in rows {
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()
    };
    emit().map_err(|e| CliError::Numeric(format!("csv write failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_is_sorted_and_tagged() {
        let mut r = Report::new("spectrum", BTreeMap::new());
        r.scalar("zeta", 1.0, Prov::Eigensolver);
        r.scalar("alpha", 2.0, Prov::ClosedForm);
        let json = serde_json::to_string_pretty(&r).unwrap();
        let zeta = json.find("zeta").unwrap();
        let alpha = json.find("alpha").unwrap();
        assert!(alpha < zeta);
        assert!(json.contains("\"provenance\": \"closed-form\""));
    }

    #[test]
    fn fmt12_has_12_significant_digits() {
        assert_eq!(fmt12(std::f64::consts::PI), "3.14159265359e0");
    }
}
