//! Tabular results: CSV with a JSON metadata sidecar.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bumped whenever a column layout changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Grid coordinate; rows are sorted by these columns.
    Coordinate,
    Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub role: Role,
}

impl Column {
    pub fn coord(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            unit: unit.into(),
            role: Role::Coordinate,
        }
    }

    pub fn value(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            unit: unit.into(),
            role: Role::Value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub experiment: String,
    pub table: String,
    pub schema_version: u32,
    pub code_version: String,
    /// The fully resolved configuration.
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    /// Seconds since the Unix epoch when the table was produced.
    pub timestamp: u64,
    /// Derived scalars (ensemble means, branch counts, ...).
    #[serde(default)]
    pub summary: serde_json::Map<String, serde_json::Value>,
}

/// What the SVG writer draws for a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PlotSpec {
    /// One line per `y` column against `x`, split by the distinct values of
    /// the `groups` columns.
    Lines {
        x: String,
        ys: Vec<String>,
        groups: Vec<String>,
    },
    /// Wide heatmap: rows along `x`, one cell per `y` column.
    Heatmap { x: String, ys: Vec<String> },
    /// Long heatmap: `value` on the `(x, y)` plane.
    Grid { x: String, y: String, value: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    pub plot: Option<PlotSpec>,
    pub metadata: Metadata,
}

/// Sidecar contents: everything but the rows.
#[derive(Serialize, Deserialize)]
struct Sidecar {
    columns: Vec<Column>,
    plot: Option<PlotSpec>,
    metadata: Metadata,
}

impl ResultTable {
    pub fn new(columns: Vec<Column>, metadata: Metadata) -> Self {
        ResultTable {
            columns,
            rows: Vec::new(),
            plot: None,
            metadata,
        }
    }

    pub fn name(&self) -> &str {
        &self.metadata.table
    }

    pub fn with_plot(mut self, plot: PlotSpec) -> Self {
        self.plot = Some(plot);
        self
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Numeric(format!(
                "row has {} values, schema has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some(i) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite value in column `{}`",
                self.columns[i].name
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn header(&self) -> String {
        self.columns
            .iter()
            .map(|c| c.name.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Stable sort by the coordinate columns, left to right.
    pub fn sort_rows(&mut self) {
        let keys: Vec<usize> = (0..self.columns.len())
            .filter(|&i| self.columns[i].role == Role::Coordinate)
            .collect();
        self.rows.sort_by(|a, b| {
            keys.iter()
                .map(|&k| a[k].total_cmp(&b[k]))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }

    /// CSV text; every number carries 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v:.16e}").expect("write to string");
            }
            out.push('\n');
        }
        out
    }

    pub fn sidecar_json(&self) -> String {
        let s = Sidecar {
            columns: self.columns.clone(),
            plot: self.plot.clone(),
            metadata: self.metadata.clone(),
        };
        serde_json::to_string_pretty(&s).expect("sidecar serializes")
    }

    /// Rebuilds a table from its CSV text and sidecar.
    pub fn from_parts(csv: &str, sidecar: &str) -> Result<Self> {
        let s: Sidecar = serde_json::from_str(sidecar).map_err(|e| Error::Input(format!("sidecar: {e}")))?;
        let mut lines = csv.lines();
        let header = lines.next().ok_or_else(|| Error::Input("empty CSV".into()))?;
        let mut table = ResultTable {
            columns: s.columns,
            rows: Vec::new(),
            plot: s.plot,
            metadata: s.metadata,
        };
        if header != table.header() {
            return Err(Error::Input(format!(
                "CSV header `{header}` does not match the sidecar"
            )));
        }
        for (n, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Input(format!("CSV row {}: {e}", n + 1)))?;
            table.push(row)?;
        }
        Ok(table)
    }

    pub fn csv_path(&self, dir: &Path) -> PathBuf {
        dir.join(format!("{}.csv", self.name()))
    }

    pub fn sidecar_path(&self, dir: &Path) -> PathBuf {
        dir.join(format!("{}.json", self.name()))
    }

    pub fn svg_path(&self, dir: &Path) -> PathBuf {
        dir.join(format!("{}.svg", self.name()))
    }

    pub fn read(csv_path: &Path) -> Result<Self> {
        let sidecar_path = csv_path.with_extension("json");
        let csv = std::fs::read_to_string(csv_path).map_err(|e| Error::io(csv_path, e))?;
        let sidecar = std::fs::read_to_string(&sidecar_path).map_err(|e| Error::io(&sidecar_path, e))?;
        Self::from_parts(&csv, &sidecar)
    }
}
