//! Comma-separated reports with a `#`-prefixed metadata header. The first
//! line carries the generation time; everything after it is a pure function
//! of the inputs.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub kind: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(kind: &str, columns: &[&str]) -> Self {
        Self {
            kind: kind.to_string(),
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn row(&mut self, fields: Vec<String>) {
        debug_assert_eq!(fields.len(), self.columns.len());
        self.rows.push(fields);
    }

    /// Everything but the timestamp line.
    pub fn body(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        let table = w.into_inner().expect("in-memory flush");
        out.push_str(&String::from_utf8(table).expect("fields are UTF-8"));
        out
    }

    pub fn render(&self) -> String {
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!("# jointvol {} report, generated at unix time {stamp}\n{}", self.kind, self.body())
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let io = |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io)?;
        }
        fs::write(path, self.render()).map_err(io)
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.8}")
}

pub fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

pub fn flag(ok: bool) -> String {
    if ok { "pass" } else { "FAIL" }.to_string()
}
