//! Verification records, per-suite summaries and their CSV/JSON forms.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Suite;

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 8] = ["suite", "seed", "dim", "function", "metric", "value", "threshold", "pass"];

/// Placeholder function id for checks that do not involve a function.
pub const NO_FUNCTION: &str = "-";

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}` (expected csv or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// What a record measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Check {
    /// Passes when `value ≤ tolerance`.
    Residual { value: f64, tolerance: f64 },
    /// `lhs ≤ rhs`, passing when `rhs − lhs ≥ −tolerance·rhs`.
    Margin { lhs: f64, rhs: f64, tolerance: f64 },
}

impl Check {
    /// Residual, or `rhs − lhs` for a margin.
    pub fn value(&self) -> f64 {
        match *self {
            Check::Residual { value, .. } => value,
            Check::Margin { lhs, rhs, .. } => rhs - lhs,
        }
    }

    /// Largest passing residual, or smallest passing margin.
    pub fn threshold(&self) -> f64 {
        match *self {
            Check::Residual { tolerance, .. } => tolerance,
            Check::Margin { rhs, tolerance, .. } => -tolerance * rhs,
        }
    }

    pub fn pass(&self) -> bool {
        let v = self.value();
        match self {
            Check::Residual { .. } => v <= self.threshold(),
            Check::Margin { .. } => v >= self.threshold(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub suite: Suite,
    pub dim: usize,
    pub trial: usize,
    /// Derived per-trial seed.
    pub seed: u64,
    pub function: String,
    pub metric: String,
    pub check: Check,
    pub pass: bool,
    /// Seconds spent on this record.
    pub wall_time: f64,
}

impl Record {
    pub fn new(suite: Suite, dim: usize, trial: usize, seed: u64, function: &str, metric: &str, check: Check) -> Self {
        Self {
            suite,
            dim,
            trial,
            seed,
            function: function.to_string(),
            metric: metric.to_string(),
            pass: check.pass(),
            check,
            wall_time: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub records: usize,
    /// Trials dropped because a generated instance failed its re-check.
    pub skipped: usize,
    pub max_residual: Option<f64>,
    pub min_margin: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub records: Vec<Record>,
    pub summaries: Vec<SuiteSummary>,
    pub pass: bool,
}

impl VerificationReport {
    /// Builds summaries for `suites` (in the given order) from `records`.
    pub fn assemble(suites: &[Suite], records: Vec<Record>, skipped: &BTreeMap<Suite, usize>) -> Self {
        let summaries: Vec<SuiteSummary> = suites
            .iter()
            .map(|&suite| {
                let mut s = SuiteSummary {
                    suite,
                    records: 0,
                    skipped: skipped.get(&suite).copied().unwrap_or(0),
                    max_residual: None,
                    min_margin: None,
                    pass: true,
                };
                for r in records.iter().filter(|r| r.suite == suite) {
                    s.records += 1;
                    s.pass &= r.pass;
                    match r.check {
                        Check::Residual { value, .. } => {
                            s.max_residual = Some(s.max_residual.map_or(value, |m| m.max(value)));
                        }
                        Check::Margin { .. } => {
                            let m = r.check.value();
                            s.min_margin = Some(s.min_margin.map_or(m, |x| x.min(m)));
                        }
                    }
                }
                s
            })
            .collect();
        let pass = summaries.iter().all(|s| s.pass);
        Self {
            schema_version: SCHEMA_VERSION,
            records,
            summaries,
            pass,
        }
    }

    pub fn empty() -> Self {
        Self::assemble(&[], Vec::new(), &BTreeMap::new())
    }

    pub fn summary(&self, suite: Suite) -> Option<&SuiteSummary> {
        self.summaries.iter().find(|s| s.suite == suite)
    }

    /// The report with every wall time zeroed, for byte comparisons.
    pub fn without_timings(&self) -> Self {
        let mut out = self.clone();
        for r in &mut out.records {
            r.wall_time = 0.0;
        }
        out
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ReportError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.records {
            w.write_record([
                r.suite.id().to_string(),
                r.seed.to_string(),
                r.dim.to_string(),
                r.function.clone(),
                r.metric.clone(),
                format!("{:e}", r.check.value()),
                format!("{:e}", r.check.threshold()),
                r.pass.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<(), ReportError> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: Format, mut out: W) -> Result<(), ReportError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                self.write_json(&mut out)?;
                writeln!(out)?;
                Ok(())
            }
        }
    }

    pub fn to_string(&self, format: Format) -> Result<String, ReportError> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        Ok(String::from_utf8(buf).expect("report output is UTF-8"))
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    /// One line per suite.
    pub fn summary_table(&self) -> String {
        let mut s = String::new();
        for x in &self.summaries {
            let fmt_opt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3e}"));
            s.push_str(&format!(
                "{:<8} {:>6} records {:>3} skipped  max residual {:>10}  min margin {:>10}  {}\n",
                x.suite.id(),
                x.records,
                x.skipped,
                fmt_opt(x.max_residual),
                fmt_opt(x.min_margin),
                if x.pass { "PASS" } else { "FAIL" }
            ));
        }
        s.push_str(if self.pass { "overall: PASS\n" } else { "overall: FAIL\n" });
        s
    }
}

/// Writes `report` to `path` in `format`.
pub fn emit_report(report: &VerificationReport, format: Format, path: impl AsRef<Path>) -> Result<(), ReportError> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    report.write(format, &mut w)?;
    w.flush()?;
    Ok(())
}
