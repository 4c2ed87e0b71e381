//! Scenario configuration: one JSON document plus dot-path overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const MAX_WORKERS: usize = 16;
pub const HBAR_ENV: &str = "QGEO_HBAR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Phase,
    Distance,
    Uncertainty,
    Evolve,
    Measure,
    Verify,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Command::Phase => "phase",
            Command::Distance => "distance",
            Command::Uncertainty => "uncertainty",
            Command::Evolve => "evolve",
            Command::Measure => "measure",
            Command::Verify => "verify",
        };
        f.write_str(name)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Option<Command>,
    #[serde(default)]
    params: Map<String, Value>,
    output_path: Option<PathBuf>,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_hbar")]
    hbar: f64,
    workers: Option<usize>,
}

fn default_hbar() -> f64 {
    qgeo::DEFAULT_HBAR
}

/// Fully resolved scenario.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub command: Command,
    pub params: Map<String, Value>,
    pub output_path: PathBuf,
    pub seed: u64,
    pub hbar: f64,
    pub workers: usize,
    /// SHA-256 of the canonical JSON of command, params, seed and ħ.
    pub hash: String,
}

/// Command-line overrides layered on top of the file.
#[derive(Debug, Default)]
pub struct Overrides<'a> {
    pub sets: &'a [String],
    pub out: Option<&'a Path>,
    pub env_hbar: Option<String>,
}

impl ScenarioConfig {
    /// Precedence: file, then `QGEO_HBAR`, then `--set`, then `--out`.
    pub fn load(command: Command, path: &Path, overrides: &Overrides<'_>) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Self::from_value(command, doc, overrides)
    }

    pub fn from_value(command: Command, mut doc: Value, overrides: &Overrides<'_>) -> Result<Self> {
        if !doc.is_object() {
            bail!("config must be a JSON object");
        }
        if let Some(raw) = &overrides.env_hbar {
            let hbar: f64 = raw.trim().parse().with_context(|| format!("{HBAR_ENV}={raw:?} is not a number"))?;
            doc["hbar"] = json!(hbar);
        }
        for item in overrides.sets {
            apply_set(&mut doc, item)?;
        }
        let raw: RawConfig = serde_json::from_value(doc).context("invalid config")?;
        if let Some(c) = raw.command {
            if c != command {
                bail!("config is for `{c}` but `{command}` was requested");
            }
        }
        if !(raw.hbar.is_finite() && raw.hbar > 0.0) {
            bail!("hbar must be positive and finite, got {}", raw.hbar);
        }
        let workers = match raw.workers {
            Some(0) => bail!("workers must be at least 1"),
            Some(w) => w.min(MAX_WORKERS),
            None => std::thread::available_parallelism().map_or(1, |n| n.get()).min(MAX_WORKERS),
        };
        let output_path = overrides
            .out
            .map(Path::to_path_buf)
            .or(raw.output_path)
            .unwrap_or_else(|| PathBuf::from("."));
        let canonical = json!({
            "command": command,
            "params": raw.params,
            "seed": raw.seed,
            "hbar": raw.hbar,
        });
        let digest = Sha256::digest(canonical.to_string().as_bytes());
        let hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self {
            command,
            params: raw.params,
            output_path,
            seed: raw.seed,
            hbar: raw.hbar,
            workers,
            hash,
        })
    }

    /// Deserializes the command parameters, rejecting unknown keys.
    pub fn params<T: serde::de::DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_value(Value::Object(self.params.clone()))
            .with_context(|| format!("invalid params for `{}`", self.command))
    }
}

/// `a.b.c=value`; the value is read as JSON when it parses, else as a string.
fn apply_set(doc: &mut Value, item: &str) -> Result<()> {
    let Some((path, raw)) = item.split_once('=') else {
        bail!("--set expects key=value, got {item:?}");
    };
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        bail!("--set key {path:?} has an empty segment");
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
    let mut node = doc;
    for key in &keys[..keys.len() - 1] {
        let obj = node
            .as_object_mut()
            .with_context(|| format!("--set {path}: {key:?} is inside a non-object"))?;
        node = obj.entry(key.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    let obj = node
        .as_object_mut()
        .with_context(|| format!("--set {path}: parent is not an object"))?;
    obj.insert(keys[keys.len() - 1].to_owned(), value);
    Ok(())
}
