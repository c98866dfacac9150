use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Typed access to a string parameter map. Every lookup records the value
/// used (default or given) and [`Params::finish`] rejects unknown keys.
#[derive(Debug)]
pub struct Params<'a> {
    given: &'a BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
    seen: BTreeSet<String>,
}

impl<'a> Params<'a> {
    pub fn new(given: &'a BTreeMap<String, String>) -> Self {
        Params {
            given,
            resolved: BTreeMap::new(),
            seen: BTreeSet::new(),
        }
    }

    fn raw(&mut self, key: &str) -> Option<&'a str> {
        self.seen.insert(key.to_string());
        self.given.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr + Display>(&mut self, key: &str, default: T) -> Result<T> {
        let value = match self.raw(key) {
            Some(text) => parse_one(key, text)?,
            None => default,
        };
        self.resolved.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    /// Comma-separated list, or an inclusive range `a..b` for integers.
    pub fn list<T>(&mut self, key: &str, default: &[T]) -> Result<Vec<T>>
    where
        T: FromStr + Display + Copy + TryFrom<u64>,
    {
        let values = match self.raw(key) {
            None => default.to_vec(),
            Some(text) => parse_list(key, text)?,
        };
        if values.is_empty() {
            return Err(Error::Config(format!("{key} is empty")));
        }
        let shown: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        self.resolved.insert(key.to_string(), shown.join(","));
        Ok(values)
    }

    /// Resolved parameters, or an error naming any key nobody asked for.
    pub fn finish(self) -> Result<BTreeMap<String, String>> {
        let unknown: Vec<&String> = self
            .given
            .keys()
            .filter(|k| !self.seen.contains(*k))
            .collect();
        if !unknown.is_empty() {
            return Err(Error::Config(format!("unknown parameters {unknown:?}")));
        }
        Ok(self.resolved)
    }
}

fn parse_one<T: FromStr>(key: &str, text: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse {key}={text:?}")))
}

fn parse_list<T: FromStr + TryFrom<u64>>(key: &str, text: &str) -> Result<Vec<T>> {
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = parse_one(key, lo)?;
        let hi: u64 = parse_one(key, hi)?;
        if lo > hi {
            return Err(Error::Config(format!("{key} range {text:?} is empty")));
        }
        return (lo..=hi)
            .map(|v| {
                T::try_from(v).map_err(|_| Error::Config(format!("{key} value {v} out of range")))
            })
            .collect();
    }
    text.split(',').map(|part| parse_one(key, part)).collect()
}
