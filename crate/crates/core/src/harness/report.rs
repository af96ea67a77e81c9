//! Report records and their JSON / CSV forms.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::ExperimentConfig;

/// Header of the tail-vs-bound CSV table.
pub const CSV_HEADER: [&str; 6] = ["theta", "p_hat", "stderr", "bound", "vacuous", "assumption3_violations"];

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// One check. A skipped check carries its reason and counts as passing;
/// non-finite values are stored as `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    /// `rhs − lhs` for inequality checks.
    pub margin: Option<f64>,
    pub pass: bool,
    pub skipped: Option<String>,
}

impl CheckRecord {
    /// Passes iff `lhs ≤ rhs`.
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs: finite(lhs),
            rhs: finite(rhs),
            margin: finite(rhs - lhs),
            pass: lhs <= rhs,
            skipped: None,
        }
    }

    /// Passes iff the count is zero.
    pub fn zero(name: impl Into<String>, count: usize) -> Self {
        Self::le(name, count as f64, 0.0)
    }

    pub fn skip(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            lhs: None,
            rhs: None,
            margin: None,
            pass: true,
            skipped: Some(reason.into()),
        }
    }

    /// A failed check whose evaluation raised an error.
    pub fn error(name: impl Into<String>, err: &Error) -> Self {
        Self {
            name: name.into(),
            lhs: None,
            rhs: None,
            margin: None,
            pass: false,
            skipped: Some(format!("error: {err}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub theta: f64,
    pub p_hat: f64,
    pub stderr: f64,
    pub bound: Option<f64>,
    pub vacuous: bool,
    pub assumption3_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentStamp {
    pub version: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    /// Sorted by name.
    pub checks: Vec<CheckRecord>,
    pub table: Vec<TableRow>,
    pub environment: EnvironmentStamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("report JSON: {e}")))
    }

    pub fn table_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for row in &self.table {
            w.serialize(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.table_csv(),
        }
    }

    pub fn emit(&self, format: Format, path: &Path) -> Result<()> {
        std::fs::write(path, self.render(format)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

pub fn table_from_csv(text: &str) -> Result<Vec<TableRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::Config(format!("csv header: {e}")))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Config(format!("unexpected csv header {header:?}")));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Config(format!("csv: {e}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{ExperimentConfig, Suite};

    fn sample() -> Report {
        Report {
            config: ExperimentConfig::for_suite(Suite::ChernoffSweep),
            checks: vec![
                CheckRecord::le("a", 0.1 + 0.2, 0.3),
                CheckRecord::le("b", 1.0, f64::INFINITY),
                CheckRecord::skip("c", "capacity"),
            ],
            table: vec![
                TableRow {
                    theta: 1.0 / 3.0,
                    p_hat: 0.25,
                    stderr: 1e-3,
                    bound: Some(0.7),
                    vacuous: false,
                    assumption3_violations: 0,
                },
                TableRow {
                    theta: 2.0,
                    p_hat: 0.0,
                    stderr: 0.0,
                    bound: None,
                    vacuous: true,
                    assumption3_violations: 3,
                },
            ],
            environment: EnvironmentStamp {
                version: "0.1.0".into(),
                seed: 1,
            },
        }
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
        assert!(!r.all_pass());
        assert_eq!(r.checks[1].rhs, None);
    }

    #[test]
    fn csv_round_trip_and_empty_table() {
        let mut r = sample();
        let csv = r.table_csv();
        assert!(csv.starts_with("theta,p_hat,stderr,bound,vacuous,assumption3_violations\n"));
        assert_eq!(csv.lines().count(), 1 + r.table.len());
        assert_eq!(table_from_csv(&csv).unwrap(), r.table);
        r.table.clear();
        assert_eq!(r.table_csv(), "theta,p_hat,stderr,bound,vacuous,assumption3_violations\n");
        assert!(table_from_csv(&r.table_csv()).unwrap().is_empty());
    }
}
