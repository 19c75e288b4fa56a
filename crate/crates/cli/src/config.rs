use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Settings shared by all subcommands. `simulate` also reads the run keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    #[serde(rename = "F")]
    pub f: f64,
    pub beta: f64,
    pub seed: u64,
    pub tol: f64,
    pub out: Option<PathBuf>,
    /// `run` or `beta-equivalence`.
    pub mode: String,
    /// `stationary`, `rossby`, `random` or an expression in `x, y`.
    pub initial: String,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub output_every: usize,
    pub k: f64,
    pub amplitude: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            f: 1.0,
            beta: 0.0,
            seed: 0,
            tol: 1e-9,
            out: None,
            mode: "run".into(),
            initial: "stationary".into(),
            n: 64,
            dt: 1e-3,
            t_end: 1.0,
            dealias: true,
            output_every: 0,
            k: 1.0,
            amplitude: 1.0,
        }
    }
}

fn scalar(raw: &str) -> Value {
    let s = raw.trim();
    if let Ok(i) = s.parse::<u64>() {
        return Value::from(i);
    }
    if let Ok(x) = s.parse::<f64>() {
        return Value::from(x);
    }
    match s {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => Value::String(s.trim_matches('"').to_string()),
    }
}

/// Parses `key = value` lines (`#` starts a comment) or a JSON object.
pub fn parse_config(text: &str) -> Result<Config> {
    let trimmed = text.trim_start();
    let map: Map<String, Value> = if trimmed.starts_with('{') {
        serde_json::from_str(trimmed).context("config is not a JSON object")?
    } else {
        let mut map = Map::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("line {}: expected key = value", n + 1);
            };
            map.insert(k.trim().to_string(), scalar(v));
        }
        map
    };
    let cfg: Config = serde_json::from_value(Value::Object(map)).context("invalid config")?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text)
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            bail!("tol must be positive");
        }
        if self.dt.is_nan() || self.dt <= 0.0 {
            bail!("dt must be positive");
        }
        if !matches!(self.mode.as_str(), "run" | "beta-equivalence") {
            bail!("mode must be run or beta-equivalence");
        }
        Ok(())
    }
}
