//! CSV tables and the run manifest.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    /// Floats carry 17 significant digits so they round-trip exactly.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if v.is_nan() => "NaN".to_string(),
            Cell::Float(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Float(v.unwrap_or(f64::NAN))
    }
}

/// One CSV file: a fixed header and rows in output order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(file: impl Into<String>, columns: &[&str]) -> Self {
        Self { file: file.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in {}", self.file);
        self.rows.push(row);
    }

    /// Comma separated, LF line endings.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join(&self.file);
        let file = File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(BufWriter::new(file));
        let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub columns: Vec<String>,
    pub rows: usize,
}

/// Written as `manifest.json` next to the CSVs. The CSVs themselves carry no
/// timestamps, so reruns reproduce them byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub pipeline: String,
    pub version: String,
    pub parameters: std::collections::BTreeMap<String, String>,
    pub started_unix_s: f64,
    pub wall_clock_s: f64,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}
