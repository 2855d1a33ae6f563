//! Run configuration and provenance. A run is reproducible from its
//! RunConfig alone: the config carries the command, every parameter as a
//! string, and the seed; the provenance record stores the config, its hash,
//! the crate version, and the run's residuals.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            command: command.to_string(),
            params: BTreeMap::new(),
            seed: 0,
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn set_opt(&mut self, key: &str, value: Option<impl ToString>) -> &mut Self {
        if let Some(v) = value {
            self.set(key, v);
        }
        self
    }

    /// Environment seed override: PLATEAU_SEED beats the config value.
    pub fn apply_env_seed(&mut self) {
        if let Ok(s) = std::env::var("PLATEAU_SEED") {
            if let Ok(v) = s.parse::<u64>() {
                self.seed = v;
            }
        }
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .with_context(|| format!("missing required parameter '{key}'"))?
            .parse::<f64>()
            .with_context(|| format!("parameter '{key}' is not a number"))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<f64>()
                .with_context(|| format!("parameter '{key}' is not a number")),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .with_context(|| format!("parameter '{key}' is not an integer")),
        }
    }

    pub fn i32_req(&self, key: &str) -> Result<i32> {
        self.params
            .get(key)
            .with_context(|| format!("missing required parameter '{key}'"))?
            .parse::<i32>()
            .with_context(|| format!("parameter '{key}' is not an integer"))
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.params.get(key).map(|s| s.as_str()).unwrap_or(default)
    }

    /// Canonical JSON representation (sorted keys via BTreeMap).
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn sha256(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        let mut out = String::with_capacity(64);
        for b in digest {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }

    /// Load from a file: JSON when the content starts with '{', otherwise
    /// line-oriented key=value (with `command=...` selecting the command and
    /// `seed=...` the seed).
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            let cfg: RunConfig = serde_json::from_str(&text).context("parsing JSON config")?;
            return Ok(cfg);
        }
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {} is not key=value: '{raw}'", lineno + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "command" => cfg.command = value.to_string(),
                "seed" => cfg.seed = value.parse().context("seed must be an integer")?,
                _ => {
                    cfg.params.insert(key.to_string(), value.to_string());
                }
            }
        }
        if cfg.command.is_empty() {
            bail!("config file does not set 'command'");
        }
        Ok(cfg)
    }
}

/// Provenance record written next to every artifact set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub config: RunConfig,
    pub config_sha256: String,
    pub version: String,
    pub residuals: BTreeMap<String, f64>,
    pub artifacts: Vec<String>,
}

impl Provenance {
    pub fn new(config: &RunConfig) -> Self {
        Provenance {
            config: config.clone(),
            config_sha256: config.sha256(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            residuals: BTreeMap::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn residual(&mut self, name: &str, value: f64) {
        self.residuals.insert(name.to_string(), value);
    }

    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        let path = dir.join(format!("{stem}.provenance.json"));
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}
