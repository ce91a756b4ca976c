//! Run reports: config echo, invariants, artifacts and timings, written as TOML.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Invariant {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ScenarioConfig,
    pub pass: bool,
    pub invariants: Vec<Invariant>,
    /// Scalar results worth quoting (mean energy, fitted exponents, ...).
    pub metrics: Vec<(String, f64)>,
    pub notes: Vec<String>,
    pub artifacts: Vec<PathBuf>,
    pub timings: Vec<Timing>,
}

impl RunReport {
    pub fn new(config: ScenarioConfig) -> Self {
        Self {
            config,
            pass: true,
            invariants: Vec::new(),
            metrics: Vec::new(),
            notes: Vec::new(),
            artifacts: Vec::new(),
            timings: Vec::new(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.config.output_dir
    }

    /// Record `value <= bound`.
    pub fn check(&mut self, name: &str, value: f64, bound: f64) {
        assert!(
            self.invariants.iter().all(|i| i.name != name),
            "invariant {name} recorded twice"
        );
        let pass = value <= bound && value.is_finite();
        self.pass &= pass;
        self.invariants.push(Invariant {
            name: name.to_string(),
            value,
            bound,
            pass,
        });
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.push((name.into(), value));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(Timing {
            stage: stage.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }

    pub fn metric_value(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// Write `name` into the output directory and list it as an artifact.
    pub fn write_artifact(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir().join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, contents)?;
        self.artifacts.push(PathBuf::from(name));
        Ok(())
    }

    pub fn write_table(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        self.write_artifact(name, &table.to_tsv())
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        let mut doc = toml::Table::new();
        doc.insert("pass".into(), self.pass.into());
        doc.insert("config".into(), toml::Value::try_from(&self.config)?);
        doc.insert("invariant".into(), toml::Value::try_from(&self.invariants)?);
        let metrics: toml::Table = self
            .metrics
            .iter()
            .map(|(k, v)| (k.clone(), toml::Value::Float(*v)))
            .collect();
        doc.insert("metrics".into(), metrics.into());
        doc.insert("notes".into(), toml::Value::try_from(&self.notes)?);
        doc.insert("artifacts".into(), toml::Value::try_from(&self.artifacts)?);
        doc.insert("timing".into(), toml::Value::try_from(&self.timings)?);
        Ok(toml::to_string(&doc)?)
    }

    pub fn write(&mut self) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(self.dir())?;
        let path = self.dir().join("report.toml");
        std::fs::write(&path, self.to_toml()?)?;
        Ok(path)
    }

    /// One line per invariant, then metrics and notes.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for i in &self.invariants {
            let verdict = if i.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{verdict} {} = {:.3e} (<= {:.1e})", i.name, i.value, i.bound);
        }
        for (k, v) in &self.metrics {
            let _ = writeln!(out, "     {k} = {v:.6e}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "     {n}");
        }
        out
    }
}

/// Tab-separated numeric table with a `#` header line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("# {}\n", self.columns.join("\t"));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}
