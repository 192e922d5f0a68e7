//! Sweep configuration: a flat key-value file with CLI overrides on top.

use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("config key `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error("unknown config key `{key}`")]
    UnknownKey { key: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// One sweep: a list of N values with shared exponents and presets.
/// Derived per point: `h = [N^theta]`, `D = [N^lambda1]`, `Q = [N^lambda2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n_list: Vec<i64>,
    pub theta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub delta: f64,
    pub preset1: String,
    pub preset2: String,
    pub seed: u64,
    pub output_path: String,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_list: vec![1 << 14],
            theta: 0.3,
            lambda1: 0.55,
            lambda2: 0.55,
            delta: 0.01,
            preset1: "moebius".to_string(),
            preset2: "moebius".to_string(),
            seed: 1,
            output_path: "records.csv".to_string(),
        }
    }
}

impl SweepConfig {
    pub fn from_file(path: &Path) -> Result<SweepConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg = SweepConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line: idx + 1,
                text: line.to_string(),
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Set one field from its text form; CLI overrides funnel through here
    /// too so file and flag parsing agree.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
            value.parse().map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                reason: format!("cannot parse `{value}`"),
            })
        }
        match key {
            "N_list" | "n_list" => {
                let mut list = Vec::new();
                for piece in value.split(',') {
                    list.push(num::<i64>(key, piece.trim())?);
                }
                self.n_list = list;
            }
            "theta" => self.theta = num(key, value)?,
            "lambda1" => self.lambda1 = num(key, value)?,
            "lambda2" => self.lambda2 = num(key, value)?,
            "delta" => self.delta = num(key, value)?,
            "preset1" => self.preset1 = value.to_string(),
            "preset2" => self.preset2 = value.to_string(),
            "seed" => self.seed = num(key, value)?,
            "output_path" => self.output_path = value.to_string(),
            _ => {
                return Err(ConfigError::UnknownKey {
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_list.is_empty() {
            return Err(ConfigError::Invalid("N_list is empty".into()));
        }
        if !(self.theta > 0.0 && self.theta < 0.5) {
            return Err(ConfigError::Invalid(format!(
                "theta = {} outside (0, 1/2)",
                self.theta
            )));
        }
        if !(self.lambda1 > 0.0 && self.lambda1 <= self.lambda2 && self.lambda2 < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "need 0 < lambda1 <= lambda2 < 1, got {} and {}",
                self.lambda1, self.lambda2
            )));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(ConfigError::Invalid(format!(
                "delta = {} outside (0, 1/2)",
                self.delta
            )));
        }
        for &n in &self.n_list {
            if n < 2 {
                return Err(ConfigError::Invalid(format!("N = {n} too small")));
            }
            if derived(n, self.theta) < 1 {
                return Err(ConfigError::Invalid(format!(
                    "h = [N^theta] < 1 at N = {n}"
                )));
            }
            if 2 * derived(n, self.theta) > n / 2 {
                return Err(ConfigError::Invalid(format!(
                    "window 2h exceeds N/2 at N = {n}; lower theta"
                )));
            }
        }
        Ok(())
    }

    /// All scalar fields as ordered (key, value) text pairs, for echoing.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert(
            "N_list".into(),
            self.n_list
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        m.insert("theta".into(), self.theta.to_string());
        m.insert("lambda1".into(), self.lambda1.to_string());
        m.insert("lambda2".into(), self.lambda2.to_string());
        m.insert("delta".into(), self.delta.to_string());
        m.insert("preset1".into(), self.preset1.clone());
        m.insert("preset2".into(), self.preset2.clone());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("output_path".into(), self.output_path.clone());
        m
    }
}

/// `[N^e]` as an i64.
pub fn derived(n: i64, exponent: f64) -> i64 {
    (n as f64).powf(exponent).floor() as i64
}
