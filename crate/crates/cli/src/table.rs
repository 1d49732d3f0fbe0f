//! Rectangular result tables with bit-exact CSV serialization and the JSON
//! run summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

/// A rectangular table of real numbers with named, unit-annotated columns.
#[derive(Debug, Clone)]
pub struct ResultTable {
    name: String,
    /// (column name, unit) pairs; "1" marks a dimensionless column.
    columns: Vec<(String, String)>,
    rows: Vec<Vec<f64>>,
    /// true when every number in the table came from a converged
    /// computation.
    converged: bool,
}

impl ResultTable {
    pub fn new(name: &str, columns: &[(&str, &str)]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns
                .iter()
                .map(|(n, u)| (n.to_string(), u.to_string()))
                .collect(),
            rows: Vec::new(),
            converged: true,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the column schema"
        );
        self.rows.push(row);
    }

    /// CSV text: a `# key: value` metadata preamble, a header of
    /// `name [unit]` columns plus the convergence flag, then the rows in
    /// scientific notation with 17 significant digits (bit-exact f64
    /// round-trips).
    pub fn to_csv(&self, config_hash: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# table: {}", self.name);
        let _ = writeln!(out, "# config_hash: {config_hash}");
        let _ = writeln!(out, "# tool_version: {}", env!("CARGO_PKG_VERSION"));
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|(n, u)| format!("{n} [{u}]"))
            .collect();
        let _ = writeln!(out, "{},converged", header.join(","));
        let flag = if self.converged { "1" } else { "0" };
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_sig17(*v)).collect();
            let _ = writeln!(out, "{},{flag}", cells.join(","));
        }
        out
    }
}

/// Scientific notation with 17 significant digits: enough to round-trip
/// every finite f64 exactly.
pub fn format_sig17(v: f64) -> String {
    format!("{v:.16e}")
}

/// The per-run JSON summary.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub config_hash: String,
    pub tool_version: String,
    pub metrics: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    /// Machine-readable acceptance violations; non-empty means exit code 4.
    pub violations: Vec<String>,
    pub tables: Vec<String>,
    pub converged: bool,
}

impl RunSummary {
    pub fn new(experiment: &str, config_hash: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            config_hash: config_hash.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            metrics: BTreeMap::new(),
            flags: BTreeMap::new(),
            violations: Vec::new(),
            tables: Vec::new(),
            converged: true,
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) -> &mut Self {
        self.metrics.insert(name.to_string(), value);
        self
    }

    pub fn flag(&mut self, name: &str, value: bool) -> &mut Self {
        self.flags.insert(name.to_string(), value);
        self
    }

    pub fn violation(&mut self, message: impl Into<String>) -> &mut Self {
        self.violations.push(message.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serialization")
    }
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub summary: RunSummary,
    pub tables: Vec<ResultTable>,
}

impl RunArtifacts {
    /// Write the tables and summary under `dir` with an optional file-stem
    /// prefix, honoring the requested formats. Returns the file names
    /// written, in deterministic order.
    pub fn write(
        &mut self,
        dir: &Path,
        prefix: &str,
        formats: &[String],
        config_hash: &str,
    ) -> Result<Vec<String>> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        let mut written = Vec::new();
        let csv = formats.iter().any(|f| f == "csv");
        let json = formats.iter().any(|f| f == "json");
        if csv {
            for table in &self.tables {
                let file = format!("{prefix}{}.csv", table.name());
                fs::write(dir.join(&file), table.to_csv(config_hash))
                    .with_context(|| format!("writing {file}"))?;
                self.summary.tables.push(file.clone());
                written.push(file);
            }
        }
        self.summary.converged = self.tables.iter().all(|t| t.converged());
        if json {
            let file = format!("{prefix}summary.json");
            fs::write(dir.join(&file), self.summary.to_json())
                .with_context(|| format!("writing {file}"))?;
            written.push(file);
        }
        if written.is_empty() {
            bail!("no output format selected");
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digit_csv_round_trips_exactly() {
        let values = [
            std::f64::consts::PI,
            -1.0 / 3.0,
            6.02214076e23,
            5e-324,
            -0.0,
            1.7976931348623157e308,
        ];
        for v in values {
            let s = format_sig17(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{v} -> {s}");
        }
    }

    #[test]
    fn csv_layout_has_header_metadata_and_flag() {
        let mut t = ResultTable::new("demo", &[("t", "1"), ("j", "1/time")]);
        t.push(vec![0.0, 1.5]);
        let csv = t.to_csv("abc123");
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# table: demo");
        assert_eq!(lines[1], "# config_hash: abc123");
        assert!(lines[2].starts_with("# tool_version:"));
        assert_eq!(lines[3], "t [1],j [1/time],converged");
        assert!(lines[4].ends_with(",1"));
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn ragged_rows_are_rejected() {
        let mut t = ResultTable::new("demo", &[("a", "1")]);
        t.push(vec![1.0, 2.0]);
    }
}
