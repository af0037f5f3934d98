//! Plain-text `key = value` experiment configs.
//!
//! Blank lines and lines starting with `#` are ignored. Keys may appear once.
//! List values are comma separated.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
    lines: BTreeMap<String, usize>,
}

impl FromStr for Config {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let Some((key, value)) = s.split_once('=') else {
                return Err(Error::Parse { line, message: format!("expected `key = value`, got `{s}`") });
            };
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.') {
                return Err(Error::Parse { line, message: format!("invalid key `{key}`") });
            }
            if cfg.entries.contains_key(key) {
                return Err(Error::Parse { line, message: format!("duplicate key `{key}`") });
            }
            cfg.entries.insert(key.to_string(), value.trim().to_string());
            cfg.lines.insert(key.to_string(), line);
        }
        Ok(cfg)
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.insert(key.into(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    fn bad(&self, key: &str, what: &str) -> Error {
        Error::Parse { line: self.lines.get(key).copied().unwrap_or(0), message: format!("`{key}`: {what}") }
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| self.bad(key, &format!("cannot parse `{v}`"))),
        }
    }

    pub fn list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| self.bad(key, &format!("cannot parse `{s}` as a number"))))
                .collect(),
        }
    }

    /// Fails on keys outside `known`.
    pub fn check_keys(&self, known: &[&str]) -> Result<()> {
        match self.entries.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(self.bad(k, &format!("unknown key (expected one of {})", known.join(", ")))),
            None => Ok(()),
        }
    }

    /// Canonical `key=value` lines in key order.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    /// SHA-256 of the experiment id and the canonical config, hex encoded.
    pub fn hash(&self, experiment: &str) -> String {
        let mut h = Sha256::new();
        h.update(experiment.as_bytes());
        h.update(b"\n");
        h.update(self.canonical().as_bytes());
        h.finalize().iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_hashes() {
        let c: Config = "# radii\nr = 1, 2,4\n\nintervals=64\n".parse().unwrap();
        assert_eq!(c.list_or("r", &[]).unwrap(), vec![1.0, 2.0, 4.0]);
        assert_eq!(c.parse_or("intervals", 0usize).unwrap(), 64);
        assert_eq!(c.parse_or("missing", 3.5).unwrap(), 3.5);
        let d: Config = "intervals = 64\nr=1, 2,4".parse().unwrap();
        assert_eq!(c.hash("x"), d.hash("x"));
        assert_ne!(c.hash("x"), c.hash("y"));
        assert_eq!(c.hash("x").len(), 64);
    }

    #[test]
    fn errors_name_the_line() {
        match "a = 1\n\nnonsense\n".parse::<Config>() {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match "a = 1\na = 2".parse::<Config>() {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let c: Config = "\nr = 1, x".parse().unwrap();
        match c.list_or("r", &[]) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(c.check_keys(&["s"]).is_err());
    }
}
