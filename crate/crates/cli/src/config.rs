//! `key = value` config files and flag/config/default resolution.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use pcfuse::io::manifest::parse_key_values;

use crate::CliError;

/// Keys understood by at least one command.
const KNOWN_KEYS: &[&str] = &[
    "threads",
    "points",
    "seed",
    "gt_upsample",
    "input_view",
    "random_view",
    "completer",
    "completion_mode",
    "upsample",
    "fuse_mode",
    "vote_threshold",
    "vote_tol",
    "radius",
    "min_neighbors",
    "voting",
    "radius_filter",
    "icp",
    "json",
];

#[derive(Debug, Default)]
pub struct Config {
    values: HashMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::format(format!("config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> pcfuse::Result<Self> {
        let mut values = HashMap::new();
        for (k, v) in parse_key_values(text)? {
            if !KNOWN_KEYS.contains(&k.as_str()) {
                log::warn!("config: unknown key `{k}`");
            }
            values.insert(k, v);
        }
        Ok(Config { values })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::input(format!("config: bad value for `{key}`: `{v}`"))),
        }
    }

    /// Flag if given, else the config value, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }

    /// Like [`Config::pick`] for switches that can only be turned one way on
    /// the command line: `forced` (the switch was passed) wins, giving
    /// `forced_value`.
    pub fn switch(&self, forced: bool, forced_value: bool, key: &str, default: bool) -> Result<bool, CliError> {
        if forced {
            return Ok(forced_value);
        }
        Ok(self.get(key)?.unwrap_or(default))
    }
}
