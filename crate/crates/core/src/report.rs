//! Experiment reports and CSV grids.
//!
//! `report.json` holds everything that must be reproducible; the wall-clock
//! time goes to a separate `timing.json` so that reruns compare byte for byte.
//! Numbers are written as shortest round-trip decimals.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::Config;
use crate::error::{Error, Result};

pub const OUTPUT_ENV: &str = "DRIFTGEOM_OUT";

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub measured: f64,
    /// Human-readable rule, e.g. `<= 1e-6`.
    pub rule: String,
    pub tolerance: f64,
    pub pass: bool,
    /// Informational verdicts are reported but never fail a run.
    pub informational: bool,
}

impl Verdict {
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Verdict { name: name.into(), measured, rule: format!("<= {tolerance:e}"), tolerance, pass: measured <= tolerance, informational: false }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Verdict { name: name.into(), measured, rule: format!(">= {tolerance:e}"), tolerance, pass: measured >= tolerance, informational: false }
    }

    pub fn greater_than(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Verdict { name: name.into(), measured, rule: format!("> {tolerance:e}"), tolerance, pass: measured > tolerance, informational: false }
    }

    /// A boolean check; `measured` is 1 or 0.
    pub fn holds(name: impl Into<String>, ok: bool, rule: impl Into<String>) -> Self {
        Verdict { name: name.into(), measured: if ok { 1.0 } else { 0.0 }, rule: rule.into(), tolerance: 0.0, pass: ok, informational: false }
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub version: String,
    pub config_hash: String,
    pub config: BTreeMap<String, String>,
    pub measured: Value,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: &Config, measured: impl Serialize, verdicts: Vec<Verdict>) -> Result<Self> {
        let pass = verdicts.iter().all(|v| v.pass || v.informational);
        Ok(ExperimentReport {
            experiment: experiment.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.hash(experiment),
            config: config.entries().clone(),
            measured: serde_json::to_value(measured)?,
            verdicts,
            pass,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Output root: `$DRIFTGEOM_OUT`, else `./runs`.
pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("runs"))
}

/// `<root>/<experiment>-<first 16 hex digits of the config hash>`
pub fn run_dir(root: &Path, report: &ExperimentReport) -> PathBuf {
    root.join(format!("{}-{}", report.experiment.replace(' ', "_"), &report.config_hash[..16]))
}

/// Writes `report.json`, `timing.json` and the given CSV grids into a fresh
/// run directory and returns its path.
pub fn write_run(root: &Path, report: &ExperimentReport, wall_clock_seconds: f64, csvs: &[Csv]) -> Result<PathBuf> {
    let dir = run_dir(root, report);
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("report.json"), report.to_json()?)?;
    fs::write(dir.join("timing.json"), format!("{{\"wall_clock_seconds\": {}}}\n", serde_json::to_string(&wall_clock_seconds)?))?;
    for c in csvs {
        fs::write(dir.join(&c.name), c.to_bytes()?)?;
    }
    Ok(dir)
}

/// A numeric table with a header row.
#[derive(Clone, Debug, PartialEq)]
pub struct Csv {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Csv {
    pub fn new(name: impl Into<String>, header: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Csv { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows }
    }

    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header: Vec<String> = rd.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(csv_error)?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|_| Error::Parse { line, message: format!("bad number `{s}`") }))
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        Ok(Csv { name: name.into(), header, rows })
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_error)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| format!("{v:?}"))).map_err(csv_error)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse { line, message: e.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let c = Csv::new("g.csv", &["x", "y"], vec![vec![0.1, 1e-300], vec![-2.5e17, f64::MIN_POSITIVE]]);
        let bytes = c.to_bytes().unwrap();
        let back = Csv::parse("g.csv", std::str::from_utf8(&bytes).unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_bytes().unwrap(), bytes);
        assert!(Csv::parse("g.csv", "x,y\n1,2,3\n").is_err());
    }

    #[test]
    fn report_is_keyed_by_config() {
        let mut cfg = Config::default();
        cfg.set("R", 1.0);
        let r = ExperimentReport::new("estimate", &cfg, 13.0, vec![Verdict::at_most("x", 1.0, 2.0)]).unwrap();
        assert!(r.pass);
        cfg.set("R", 2.0);
        let s = ExperimentReport::new("estimate", &cfg, 13.0, vec![Verdict::at_most("x", 3.0, 2.0)]).unwrap();
        assert!(!s.pass);
        assert_ne!(run_dir(Path::new("o"), &r), run_dir(Path::new("o"), &s));
    }
}
