//! Typed check rows and report emission.  A run produces `report.json`
//! (full machine-readable record, deterministic for a fixed config and
//! seed except for the isolated timestamp field) and `summary.csv` (one
//! row per check, fixed column schema).

use crate::config::RunConfig;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// One verified check: what was measured, against which bound, for which
/// exponent and variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub suite: String,
    pub check: String,
    /// Exponent column: a number, "inf", or "-" when not applicable.
    pub p: String,
    pub variant: String,
    pub observed: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Row {
    pub fn new(
        suite: &str,
        check: &str,
        p: Option<f64>,
        variant: &str,
        observed: f64,
        bound: f64,
    ) -> Self {
        Self {
            suite: suite.into(),
            check: check.into(),
            p: fmt_p(p),
            variant: variant.into(),
            observed,
            bound,
            pass: observed.is_finite() && observed <= bound,
        }
    }
}

/// Formats the exponent column: trailing zeros trimmed, ∞ spelled "inf".
pub fn fmt_p(p: Option<f64>) -> String {
    match p {
        None => "-".into(),
        Some(v) if v.is_infinite() => "inf".into(),
        Some(v) => {
            let s = format!("{v}");
            s
        }
    }
}

/// CSV column order; versioned with the crate.
pub const CSV_HEADER: [&str; 7] = ["suite", "check", "p", "variant", "observed", "bound", "pass"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// Seconds since the Unix epoch at assembly; the only field that
    /// varies between identical runs.
    pub timestamp: u64,
    /// FNV-1a hash of the canonical config serialization.
    pub config_hash: String,
    pub config: RunConfig,
    pub rows: Vec<Row>,
    pub pass: bool,
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn config_hash(cfg: &RunConfig) -> String {
    let canonical = serde_json::to_string(cfg).expect("config serializes");
    format!("{:016x}", fnv1a(canonical.as_bytes()))
}

pub fn assemble_at(cfg: &RunConfig, rows: Vec<Row>, timestamp: u64) -> Report {
    let pass = rows.iter().all(|r| r.pass);
    Report {
        timestamp,
        config_hash: config_hash(cfg),
        config: cfg.clone(),
        rows,
        pass,
    }
}

pub fn assemble(cfg: &RunConfig, rows: Vec<Row>) -> Report {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    assemble_at(cfg, rows, now)
}

/// Writes `report.json` and `summary.csv` into the directory (created if
/// missing).
pub fn write_report(dir: &Path, report: &Report) -> Result<(), ReportError> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(report)?;
    std::fs::write(dir.join("report.json"), json + "\n")?;
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    w.write_record(CSV_HEADER)?;
    for r in &report.rows {
        w.write_record([
            r.suite.as_str(),
            r.check.as_str(),
            r.p.as_str(),
            r.variant.as_str(),
            &format!("{:.9e}", r.observed),
            &format!("{:.9e}", r.bound),
            if r.pass { "true" } else { "false" },
        ])?;
    }
    w.flush().map_err(std::io::Error::from)?;
    Ok(())
}

/// Lists the failing rows in a terminal-friendly form.
pub fn failures(report: &Report) -> Vec<String> {
    report
        .rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| {
            format!(
                "{}/{} (p={}, {}): observed {:.6e} exceeds bound {:.6e}",
                r.suite, r.check, r.p, r.variant, r.observed, r.bound
            )
        })
        .collect()
}
