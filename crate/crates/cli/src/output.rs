//! Writes tables and JSON documents into the output directory.

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use aqc_core::format::{sig12, Table};
use serde_json::Value;

use crate::config::{OutputFormat, RunConfig};
use crate::CliError;

/// Rounds to 12 significant digits so JSON output is as stable as the CSV rows.
pub fn num(x: f64) -> Value {
    match sig12(x).parse::<f64>() {
        Ok(v) if v.is_finite() => Value::from(v),
        _ => Value::Null,
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub struct Writer<'a> {
    cfg: &'a RunConfig,
    pub written: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    pub fn new(cfg: &'a RunConfig) -> Result<Self, CliError> {
        std::fs::create_dir_all(&cfg.out)
            .map_err(|e| CliError::Other(format!("cannot create {}: {e}", cfg.out.display())))?;
        Ok(Self {
            cfg,
            written: Vec::new(),
        })
    }

    pub fn format(&self) -> OutputFormat {
        self.cfg.format
    }

    fn stamp(&self) -> Option<u64> {
        self.cfg.timestamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        })
    }

    fn write(&mut self, file: String, body: String) -> Result<(), CliError> {
        let path = self.cfg.out.join(file);
        std::fs::write(&path, body)
            .map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    pub fn table(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        let mut body = String::new();
        if let Some(t) = self.stamp() {
            body.push_str(&format!("# generated_unix_s: {t}\n"));
        }
        body.push_str(&table.render());
        self.write(format!("{name}.csv"), body)
    }

    pub fn json(&mut self, name: &str, mut value: Value) -> Result<(), CliError> {
        if let (Some(t), Value::Object(map)) = (self.stamp(), &mut value) {
            map.insert("generated_unix_s".into(), Value::from(t));
        }
        let body = serde_json::to_string_pretty(&value)
            .map_err(|e| CliError::Other(e.to_string()))?
            + "\n";
        self.write(format!("{name}.json"), body)
    }
}
