//! Plain-text reports: `key=value` scalars and CSV tables.

use std::fmt::Display;
use std::fs;
use std::io::Write;

use dslpn::ecc::REGISTRY_VERSION;

use crate::config::Config;
use crate::CliError;

#[derive(Clone, Debug, Default)]
pub struct Table {
    name: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.header.len(), "row width of table `{}`", self.name);
        self.rows.push(cells);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    command: String,
    scalars: Vec<(String, String)>,
    tables: Vec<Table>,
}

/// Builds a `Vec<String>` row from mixed displayable values.
#[macro_export]
macro_rules! cells {
    ($($x:expr),* $(,)?) => { vec![$($x.to_string()),*] };
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            scalars: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn put(&mut self, key: &str, value: impl Display) {
        self.scalars.push((key.to_string(), value.to_string()));
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn scalar(&self, key: &str) -> Option<&str> {
        self.scalars.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self, cfg: &Config) -> String {
        let mut out = String::new();
        out.push_str("# dslpn report\n");
        out.push_str(&format!("command={}\n", self.command));
        out.push_str(&format!("registry_version={REGISTRY_VERSION}\n"));
        out.push_str("\n[config]\n");
        out.push_str(&cfg.render());
        out.push_str("\n[results]\n");
        for (k, v) in &self.scalars {
            out.push_str(&format!("{k}={v}\n"));
        }
        for t in &self.tables {
            out.push_str(&format!("\n[table {}]\n", t.name));
            out.push_str(&t.header.join(","));
            out.push('\n');
            for r in &t.rows {
                out.push_str(&r.join(","));
                out.push('\n');
            }
        }
        out
    }

    /// Writes to the `out` path, or stdout when none is configured.
    pub fn emit(&self, cfg: &Config) -> Result<(), CliError> {
        let text = self.render(cfg);
        match cfg.path("out") {
            Some(path) => fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {path}: {e}"))),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::Input(format!("cannot write report: {e}")))
            }
        }
    }
}
