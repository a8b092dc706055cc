//! Flat `key = value` experiment files. Blank lines and `#` comments are
//! ignored; later keys override earlier ones.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("line {}: expected key = value", k + 1)))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::InvalidParameter(format!("line {}: empty key", k + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Config::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| Error::InvalidParameter(format!("{key} = {s:?} is not a valid value"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .split(',')
                .map(|p| p.trim())
                .filter(|p| !p.is_empty())
                .map(|p| p.parse().map_err(|_| Error::InvalidParameter(format!("{key}: {p:?} is not a valid value"))))
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_pairs() {
        let c = Config::parse("# study\ntau = 0.01\n\nh=0.5 # trailing\ntaus = 0.1, 0.05,0.025\ntau = 0.02\n").unwrap();
        assert_eq!(c.get::<f64>("tau").unwrap(), Some(0.02));
        assert_eq!(c.get::<f64>("h").unwrap(), Some(0.5));
        assert_eq!(c.get_list::<f64>("taus").unwrap(), Some(vec![0.1, 0.05, 0.025]));
        assert_eq!(c.get::<f64>("missing").unwrap(), None);
        assert_eq!(c.get_or("degree", 1usize).unwrap(), 1);
        assert_eq!(c.keys().collect::<Vec<_>>(), vec!["h", "tau", "taus"]);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Config::parse("tau 0.1").is_err());
        assert!(Config::parse(" = 3").is_err());
        let c = Config::parse("tau = abc").unwrap();
        assert!(c.get::<f64>("tau").is_err());
    }

    #[test]
    fn overrides() {
        let mut c = Config::parse("tau = 1").unwrap();
        c.set("tau", 0.5);
        assert_eq!(c.get::<f64>("tau").unwrap(), Some(0.5));
    }
}
