//! Writers for CSV, JSON and gnuplot artifacts. Every file carries the
//! config hash, seed and ħ.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ScenarioConfig;

pub struct Artifacts<'a> {
    cfg: &'a ScenarioConfig,
    dir: &'a Path,
}

impl<'a> Artifacts<'a> {
    pub fn new(cfg: &'a ScenarioConfig) -> Result<Self> {
        let dir = cfg.output_path.as_path();
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { cfg, dir })
    }

    fn header(&self, notes: &[String]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# qgeo {}", self.cfg.command);
        let _ = writeln!(s, "# config_sha256: {}", self.cfg.hash);
        let _ = writeln!(s, "# seed: {}", self.cfg.seed);
        let _ = writeln!(s, "# hbar: {}", self.cfg.hbar);
        for n in notes {
            let _ = writeln!(s, "# note: {n}");
        }
        s
    }

    fn put(&mut self, name: &str, body: String) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    /// `body` starts with its header row.
    pub fn csv(&mut self, name: &str, notes: &[String], body: &str) -> Result<()> {
        let text = self.header(notes) + body;
        self.put(name, text)
    }

    pub fn gnuplot(&mut self, name: &str, script: &str) -> Result<()> {
        let text = self.header(&[]) + script;
        self.put(name, text)
    }

    /// Writes `{"meta": {...}, ...payload}` with keys in sorted order.
    pub fn json<T: Serialize>(&mut self, name: &str, payload: &T) -> Result<()> {
        let mut doc = serde_json::to_value(payload)?;
        let meta = json!({
            "command": self.cfg.command,
            "config_sha256": self.cfg.hash,
            "seed": self.cfg.seed,
            "hbar": self.cfg.hbar,
        });
        match &mut doc {
            Value::Object(map) => {
                map.insert("meta".into(), meta);
            }
            other => doc = json!({ "meta": meta, "data": other.take() }),
        }
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.put(name, text)
    }
}

/// Appends one CSV row of plain values.
pub fn row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}
