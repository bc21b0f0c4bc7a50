use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// A named group of scalar results.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub operation: String,
    pub fields: BTreeMap<String, Value>,
}

impl Row {
    pub fn new(operation: impl Into<String>) -> Self {
        Self {
            operation: operation.into(),
            fields: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.fields
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }
}

/// One checked statement with the tolerance it was checked at.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub check: String,
    pub verdict: String,
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub anchor: String,
}

impl Verdict {
    pub fn new(check: &str, verdict: impl Into<String>, measured: Option<f64>, tolerance: f64, anchor: &str) -> Self {
        Self {
            check: check.to_string(),
            verdict: verdict.into(),
            measured,
            tolerance,
            anchor: anchor.to_string(),
        }
    }

    pub fn pass_fail(check: &str, pass: bool, measured: f64, tolerance: f64, anchor: &str) -> Self {
        Self::new(check, if pass { "pass" } else { "fail" }, Some(measured), tolerance, anchor)
    }
}

/// Tabular data written as CSV next to the report.
#[derive(Clone, Debug, Serialize)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Section {
    pub rows: Vec<Row>,
    pub verdicts: Vec<Verdict>,
    pub series: BTreeMap<String, Series>,
}

impl Section {
    pub fn extend(&mut self, other: Section) {
        self.rows.extend(other.rows);
        self.verdicts.extend(other.verdicts);
        self.series.extend(other.series);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub version: String,
    pub inputs_digest: String,
    pub configuration: Value,
    pub tolerances: BTreeMap<String, f64>,
    pub rows: Vec<Row>,
    pub verdicts: Vec<Verdict>,
    pub series: BTreeMap<String, Series>,
}

/// SHA-256 over the configuration and the bytes of every input file.
pub fn inputs_digest(configuration: &Value, files: &[Vec<u8>]) -> String {
    let mut h = Sha256::new();
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    h.update(configuration.to_string().as_bytes());
    for f in files {
        h.update((f.len() as u64).to_le_bytes());
        h.update(f);
    }
    h.finalize().iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl RunReport {
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: graphlap {}", self.command.join(" "));
        let _ = writeln!(s, "inputs:  {}", self.inputs_digest);
        for row in &self.rows {
            let _ = writeln!(s, "\n[{}]", row.operation);
            let width = row.fields.keys().map(|k| k.len()).max().unwrap_or(0);
            for (k, v) in &row.fields {
                let _ = writeln!(s, "  {k:<width$}  {}", cell(v));
            }
        }
        if !self.verdicts.is_empty() {
            let cw = self.verdicts.iter().map(|v| v.check.len()).max().unwrap_or(0).max(5);
            let _ = writeln!(s, "\n{:<cw$} {:<13} {:>13} {:>10}  anchor", "check", "verdict", "measured", "tol");
            for v in &self.verdicts {
                let measured = v.measured.map(|m| format!("{m:.4e}")).unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    s,
                    "{:<cw$} {:<13} {:>13} {:>10.1e}  {}",
                    v.check, v.verdict, measured, v.tolerance, v.anchor
                );
            }
        }
        for (name, series) in &self.series {
            let _ = writeln!(s, "\nseries {name}: {} rows ({})", series.rows.len(), series.columns.join(", "));
        }
        s
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(path, text)
    }

    pub fn write_csv(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, series) in &self.series {
            std::fs::write(dir.join(format!("{name}.csv")), series.to_csv())?;
        }
        Ok(())
    }
}
