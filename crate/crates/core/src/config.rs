//! Run configuration: built-in defaults, overridden by a TOML file,
//! overridden by command-line flags.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::argscore::RankingMetric;
use crate::corpus::InputFormat;
use crate::pipeline::{PoolPolicy, DEFAULT_TRIALS};
use crate::rouge::Tokenizer;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid config {path}: {message}")]
    Parse { path: String, message: String },
}

/// Keys accepted in a config file. All optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub formats: Option<Vec<InputFormat>>,
    pub beams: Option<Vec<u32>>,
    pub dedupe: Option<bool>,
    pub all_beams: Option<bool>,
    pub max_beam: Option<u32>,
    pub metric: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub stem: Option<bool>,
    pub separator: Option<String>,
    pub jobs: Option<usize>,
}

impl ConfigFile {
    pub fn parse(path: &str, text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse { path: path.into(), message: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let display = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: display.clone(), source })?;
        Self::parse(&display, &text)
    }
}

/// Fully resolved configuration for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub jobs: Option<usize>,
    pub trials: usize,
    pub policy: PoolPolicy,
    pub metric: RankingMetric,
    pub tokenizer: Tokenizer,
    pub separator: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            jobs: None,
            trials: DEFAULT_TRIALS,
            policy: PoolPolicy::default(),
            metric: RankingMetric::default(),
            tokenizer: Tokenizer::default(),
            separator: " ".into(),
        }
    }
}

impl RunConfig {
    /// Apply every key present in `file` on top of `self`.
    pub fn merge_file(mut self, file: &ConfigFile) -> Result<Self, String> {
        if let Some(f) = &file.formats {
            self.policy.formats = f.iter().copied().collect();
        }
        if let Some(b) = &file.beams {
            self.policy.beam_widths = b.iter().copied().collect();
        }
        if let Some(d) = file.dedupe {
            self.policy.dedupe = d;
        }
        if let Some(a) = file.all_beams {
            self.policy.all_beams = a;
        }
        if let Some(m) = file.max_beam {
            self.policy.max_beam = m;
        }
        if let Some(m) = &file.metric {
            self.metric = m.parse()?;
        }
        if let Some(s) = file.seed {
            self.seed = s;
        }
        if let Some(t) = file.trials {
            self.trials = t;
        }
        if let Some(s) = file.stem {
            self.tokenizer.stem = s;
        }
        if let Some(s) = &file.separator {
            self.separator = s.clone();
        }
        if file.jobs.is_some() {
            self.jobs = file.jobs;
        }
        Ok(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
