//! Flat `key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored. List values are comma
//! separated.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gas::GasState;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl FromStr for KeyValues {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = k.trim().to_string();
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {key}", lineno + 1)));
            }
        }
        Ok(Self { entries })
    }
}

impl KeyValues {
    pub fn from_file(path: &Path) -> Result<Self> {
        std::fs::read_to_string(path)
            .map_err(|e| Error::io(path, e))?
            .parse()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Fails on keys outside `allowed`, catching typos early.
    pub fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(Error::Config(format!("unknown key {k}"))),
            None => Ok(()),
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
            })
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| Error::Config(format!("missing key {key}")))
    }

    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.raw(key).map(|v| parse_list(key, v)).transpose()
    }

    /// A `v, u1, theta` triple.
    pub fn state(&self, key: &str) -> Result<Option<GasState>> {
        self.raw(key).map(|v| parse_state(key, v)).transpose()
    }

    pub fn flag(&self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(Error::Config(format!("{key}: expected a boolean, got {v:?}"))),
        }
    }
}

/// Parses a comma-separated list of reals; `key` labels errors.
pub fn parse_list(key: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{key}: cannot parse {s:?}")))
        })
        .collect()
}

/// Parses `v, u1, theta`.
pub fn parse_state(key: &str, text: &str) -> Result<GasState> {
    match parse_list(key, text)?[..] {
        [v, u1, theta] => GasState::new(v, u1, theta),
        _ => Err(Error::Config(format!("{key}: expected v, u1, theta"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_values_lists_and_states() {
        let kv: KeyValues = "# comment\neps = 0.01\nleft = 1, 0, 1  # trailing\nsnapshots=0.1,0.2\nwave_i = yes\n"
            .parse()
            .unwrap();
        assert_eq!(kv.require::<f64>("eps").unwrap(), 0.01);
        assert_eq!(kv.list("snapshots").unwrap().unwrap(), vec![0.1, 0.2]);
        assert_eq!(kv.state("left").unwrap().unwrap().theta, 1.0);
        assert!(kv.flag("wave_i", false).unwrap());
        assert_eq!(kv.get_or("n_x", 10usize).unwrap(), 10);
        assert!(kv.require::<f64>("missing").is_err());
        assert!(kv.reject_unknown(&["eps", "left", "snapshots"]).is_err());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!("eps 0.1".parse::<KeyValues>().is_err());
        assert!("a = 1\na = 2".parse::<KeyValues>().is_err());
        let kv: KeyValues = "eps = abc\nleft = 1, 2".parse().unwrap();
        assert!(kv.require::<f64>("eps").is_err());
        assert!(kv.state("left").is_err());
    }
}
