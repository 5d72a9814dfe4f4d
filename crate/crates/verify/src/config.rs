//! Run configuration: defaults, a flat `key = value` file, and command-line
//! overrides, in increasing precedence.

use std::collections::BTreeMap;
use std::fs;
use std::ops::RangeInclusive;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use qshelf::shelves::required_degree;

/// Smallest window the shelf recursion has to leave for its comparisons.
pub const MIN_RECURSION_WINDOW: i64 = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {message}")]
    Io { path: String, message: String },
    #[error("config line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("bad value {value:?} for {key}: {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error("degree {degree} is too small for {shelves} shelf steps at k={k}: need at least {minimum}")]
    DegreeTooSmall { k: i64, shelves: i64, degree: i64, minimum: i64 },
    #[error("q precision {q_prec} is below the specialization degree: need at least {minimum}")]
    QPrecTooSmall { q_prec: i64, minimum: i64 },
    #[error("fault target {0:?} is not a check of this run")]
    UnknownFaultTarget(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Config {
    pub k: RangeInclusive<i64>,
    /// Truncation degree `N` of the univariate series.
    pub degree: i64,
    /// Shelves `j` examined by the shelf, hypothesis and dictionary checks.
    pub shelves: RangeInclusive<i64>,
    /// Starting shelves `J` of the `h` polynomials.
    pub start: RangeInclusive<i64>,
    /// Weight bound for the partition oracles.
    pub nmax: i64,
    /// Weight bound for the overpartition oracle.
    pub nmax_over: i64,
    /// `q` truncation of the trivariate series; `2N + 1` unless set.
    pub q_prec: Option<i64>,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub timings: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            k: 3..=3,
            degree: 40,
            shelves: 0..=3,
            start: 0..=1,
            nmax: 20,
            nmax_over: 14,
            q_prec: None,
            format: Format::Text,
            timings: false,
        }
    }
}

/// Parses `A..B`, `A..=B` or a single `A` (read as `lo..=A` when a lower
/// bound is supplied, `A..=A` otherwise).
pub fn parse_range(key: &str, value: &str, single_from: Option<i64>) -> Result<RangeInclusive<i64>, ConfigError> {
    let bad = |reason: &str| ConfigError::BadValue { key: key.into(), value: value.into(), reason: reason.into() };
    let num = |s: &str| s.trim().parse::<i64>().map_err(|_| bad("not an integer"));
    let (lo, hi) = match value.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = num(value)?;
            (single_from.unwrap_or(v), v)
        }
    };
    if lo > hi {
        return Err(bad("empty range"));
    }
    Ok(lo..=hi)
}

fn parse_int(key: &str, value: &str) -> Result<i64, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        value: value.into(),
        reason: "not an integer".into(),
    })
}

impl Config {
    /// Applies one setting; keys are the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "k" => self.k = parse_range(key, value, None)?,
            "degree" => self.degree = parse_int(key, value)?,
            "shelves" => self.shelves = parse_range(key, value, Some(0))?,
            "start-shelf" => self.start = parse_range(key, value, None)?,
            "nmax" => self.nmax = parse_int(key, value)?,
            "nmax-over" => self.nmax_over = parse_int(key, value)?,
            "q-prec" => self.q_prec = Some(parse_int(key, value)?),
            "format" => {
                self.format = match value.trim() {
                    "text" => Format::Text,
                    "json" => Format::Json,
                    _ => {
                        return Err(ConfigError::BadValue {
                            key: key.into(),
                            value: value.into(),
                            reason: "expected text or json".into(),
                        })
                    }
                }
            }
            "timings" => {
                self.timings = match value.trim() {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => {
                        return Err(ConfigError::BadValue {
                            key: key.into(),
                            value: value.into(),
                            reason: "expected a boolean".into(),
                        })
                    }
                }
            }
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn parse_file_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
        let mut out = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: n + 1, text: raw.to_string() })?;
            out.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(out)
    }

    pub fn load_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
        for (k, v) in Self::parse_file_text(&text)? {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn q_prec(&self) -> i64 {
        self.q_prec.unwrap_or(2 * self.degree + 1)
    }

    /// Degree the shelf recursion needs to leave [`MIN_RECURSION_WINDOW`]
    /// after stepping to the last configured shelf.
    pub fn recursion_minimum(&self, k: i64) -> i64 {
        required_degree(k, 0, *self.shelves.end(), MIN_RECURSION_WINDOW)
    }

    /// Structural checks, plus the precision prerequisites of the requested suites.
    pub fn validate(&self, recursion: bool, trivariate: bool) -> Result<(), ConfigError> {
        let bad = |key: &str, value: String, reason: &str| ConfigError::BadValue {
            key: key.into(),
            value,
            reason: reason.into(),
        };
        if *self.k.start() < 2 {
            return Err(bad("k", format!("{:?}", self.k), "k must be at least 2"));
        }
        if *self.shelves.start() < 0 || *self.start.start() < 0 {
            return Err(bad("shelves", format!("{:?}", self.shelves), "shelves are nonnegative"));
        }
        for (key, v) in [("degree", self.degree), ("nmax", self.nmax), ("nmax-over", self.nmax_over)] {
            if v < 1 {
                return Err(bad(key, v.to_string(), "must be positive"));
            }
        }
        if recursion {
            for k in self.k.clone() {
                let minimum = self.recursion_minimum(k);
                if self.degree < minimum {
                    return Err(ConfigError::DegreeTooSmall {
                        k,
                        shelves: *self.shelves.end(),
                        degree: self.degree,
                        minimum,
                    });
                }
            }
        }
        if trivariate && self.q_prec() < self.degree {
            return Err(ConfigError::QPrecTooSmall { q_prec: self.q_prec(), minimum: self.degree });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("k", "2..4", None).unwrap(), 2..=4);
        assert_eq!(parse_range("k", "2..=4", None).unwrap(), 2..=4);
        assert_eq!(parse_range("k", "3", None).unwrap(), 3..=3);
        assert_eq!(parse_range("shelves", "3", Some(0)).unwrap(), 0..=3);
        assert!(parse_range("k", "4..2", None).is_err());
    }

    #[test]
    fn file_format() {
        let m = Config::parse_file_text("# c\nk = 2..4\n\ndegree=30 # trailing\n").unwrap();
        assert_eq!(m["k"], "2..4");
        assert_eq!(m["degree"], "30");
        assert!(matches!(Config::parse_file_text("nonsense"), Err(ConfigError::Syntax { line: 1, .. })));
    }

    #[test]
    fn minimum_degree_reported() {
        let c = Config { degree: 12, ..Config::default() };
        match c.validate(true, false) {
            Err(ConfigError::DegreeTooSmall { minimum, .. }) => assert_eq!(minimum, c.recursion_minimum(3)),
            other => panic!("{other:?}"),
        }
    }
}
