//! Flat `key = value` configuration. Defaults come from the pipeline, a
//! config file overrides them and command-line flags override both.

use std::collections::BTreeMap;
use std::path::Path;

use crate::grid::{parse_counts, parse_values};
use crate::CliError;

/// A configurable key with its default value and a one-line description.
#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

pub const fn key(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key { name, default, help }
}

/// Resolved parameters, in key order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

/// `--key value` and `--key=value` pairs; dashes in keys become underscores.
pub fn parse_flags(args: &[String]) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let Some(flag) = arg.strip_prefix("--") else {
            return Err(CliError::Config(format!("unexpected argument `{arg}`, expected --key value")));
        };
        let (name, value) = match flag.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| CliError::Config(format!("`--{flag}` needs a value")))?;
                (flag.to_string(), v.clone())
            }
        };
        out.push((name.replace('-', "_"), value));
    }
    Ok(out)
}

/// Parses a config file: one `key = value` per line, `#` starts a comment.
pub fn parse_file(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value, got `{raw}`", i + 1)))?;
        out.push((k.trim().replace('-', "_"), v.trim().to_string()));
    }
    Ok(out)
}

impl Config {
    /// Layers `file` and then `flags` over the defaults of `keys`. Any name
    /// not among `keys` is an error.
    pub fn resolve(keys: &[Key], file: Option<&Path>, flags: &[(String, String)]) -> Result<Self, CliError> {
        let mut values: BTreeMap<String, String> =
            keys.iter().map(|k| (k.name.to_string(), k.default.to_string())).collect();
        let from_file = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
                parse_file(&text)?
            }
            None => Vec::new(),
        };
        for (k, v) in from_file.iter().chain(flags) {
            match values.get_mut(k) {
                Some(slot) => *slot = v.clone(),
                None => {
                    let known: Vec<&str> = keys.iter().map(|k| k.name).collect();
                    return Err(CliError::Config(format!("unknown key `{k}` (known: {})", known.join(", "))));
                }
            }
        }
        Ok(Self { values })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        Self { values: pairs.into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect() }
    }

    pub fn raw(&self, key: &str) -> Result<&str, CliError> {
        self.values.get(key).map(String::as_str).ok_or_else(|| CliError::Config(format!("missing key `{key}`")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        let v = self.values_of(key)?;
        match v.as_slice() {
            [x] => Ok(*x),
            _ => Err(CliError::Config(format!("`{key}` must be a single number, got `{}`", self.raw(key)?))),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        match self.counts_of(key)?.as_slice() {
            [x] => Ok(*x),
            _ => Err(CliError::Config(format!("`{key}` must be a single integer, got `{}`", self.raw(key)?))),
        }
    }

    /// `None` when the value is empty or `auto`.
    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.raw(key)?.trim() {
            "" | "auto" => Ok(None),
            _ => self.f64(key).map(Some),
        }
    }

    pub fn values_of(&self, key: &str) -> Result<Vec<f64>, CliError> {
        parse_values(key, self.raw(key)?)
    }

    pub fn counts_of(&self, key: &str) -> Result<Vec<usize>, CliError> {
        parse_counts(key, self.raw(key)?)
    }

    /// The value, which must be one of `options`.
    pub fn choice(&self, key: &str, options: &[&str]) -> Result<String, CliError> {
        let v = self.raw(key)?.trim();
        if options.contains(&v) {
            Ok(v.to_string())
        } else {
            Err(CliError::Config(format!("`{key}` must be one of {}, got `{v}`", options.join("|"))))
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}
