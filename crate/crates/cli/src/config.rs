//! Flat `key=value` experiment configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::CliError;

/// Every accepted key with its default. `auto` means the subcommand picks.
pub const KEYS: &[(&str, &str)] = &[
    ("alpha", "auto"),
    ("branch", "auto"),
    ("d", "auto"),
    ("debug", "false"),
    ("draws", "auto"),
    ("eps", "auto"),
    ("gamma", "auto"),
    ("good_d", "auto"),
    ("input", "auto"),
    ("k", "auto"),
    ("kernel", "true"),
    ("key", "none"),
    ("key_out", "none"),
    ("lambda", "auto"),
    ("m", "auto"),
    ("max_subsets", "auto"),
    ("max_tries", "auto"),
    ("n", "auto"),
    ("out", "none"),
    ("output", "none"),
    ("preset", "auto"),
    ("s", "auto"),
    ("sampler", "auto"),
    ("scheme", "ltdf"),
    ("seed", "0"),
    ("strategy", "auto"),
    ("t", "auto"),
    ("t_size", "auto"),
    ("trapdoor", "none"),
    ("trapdoor_out", "none"),
    ("trials", "auto"),
    ("w", "auto"),
    ("wmax", "auto"),
    ("workers", "auto"),
];

/// Resolved configuration, printed in sorted key order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            values: KEYS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Config {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = normalize(key);
        match self.values.get_mut(&key) {
            Some(slot) => {
                *slot = value.trim().to_string();
                Ok(())
            }
            None => Err(CliError::Input(format!("unknown config key `{key}`"))),
        }
    }

    /// Applies a config file: one `key=value` per line, `#` comments.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("config line {}: expected key=value", no + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn get(&self, key: &str) -> &str {
        self.values
            .get(key)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("config key `{key}` is not declared"))
    }

    pub fn is_auto(&self, key: &str) -> bool {
        matches!(self.get(key), "auto" | "none")
    }

    /// Value of `key`, with `default` recorded in place of `auto`.
    pub fn resolve(&mut self, key: &str, default: &str) -> String {
        if self.is_auto(key) {
            self.values.insert(key.to_string(), default.to_string());
        }
        self.get(key).to_string()
    }

    pub fn parse<T: std::str::FromStr + ToString>(&mut self, key: &str, default: T) -> Result<T, CliError> {
        let raw = self.resolve(key, &default.to_string());
        raw.parse()
            .map_err(|_| CliError::Input(format!("`{key}` must be a number, got `{raw}`")))
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.get(key) {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            other => Err(CliError::Input(format!("`{key}` must be true or false, got `{other}`"))),
        }
    }

    pub fn path(&self, key: &str) -> Option<&str> {
        (!self.is_auto(key)).then(|| self.get(key))
    }

    pub fn render(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}
