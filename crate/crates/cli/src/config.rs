use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use opsent::entanglement::Tolerances;
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Jsonl,
}

/// Contents of a `--config` file. Every key is optional; unknown keys are
/// rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub tolerances: Option<Tolerances>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text =
            fs::read_to_string(path).map_err(|e| Failure::io(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| Failure::validation(format!("config {}: {e}", path.display())))?;
        if let Some(t) = &cfg.tolerances {
            t.validate()
                .map_err(|e| Failure::validation(format!("config {}: {e}", path.display())))?;
        }
        if cfg.threads == Some(0) {
            return Err(Failure::validation(format!(
                "config {}: threads must be at least 1",
                path.display()
            )));
        }
        Ok(cfg)
    }
}

/// Settings after applying flag > config > default.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub tolerances: Tolerances,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub threads: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 0;

impl Resolved {
    pub fn merge(flags: &crate::Global, cfg: RunConfig) -> Result<Self, Failure> {
        let base = cfg.tolerances.unwrap_or_default();
        let tolerances = Tolerances {
            rank: flags.rank_tol.unwrap_or(base.rank),
            tangle: flags.tangle_tol.unwrap_or(base.tangle),
        };
        tolerances.validate().map_err(Failure::from)?;
        let threads = flags.threads.or(cfg.threads);
        if threads == Some(0) {
            return Err(Failure::validation("thread count must be at least 1".into()));
        }
        Ok(Self {
            tolerances,
            format: flags.format.or(cfg.format),
            output: flags.output.clone().or(cfg.output),
            seed: flags.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
            threads,
        })
    }

    /// The requested format if the command supports it, else its default.
    pub fn format(&self, allowed: &[Format], command: &str) -> Result<Format, Failure> {
        match self.format {
            None => Ok(allowed[0]),
            Some(f) if allowed.contains(&f) => Ok(f),
            Some(f) => Err(Failure::validation(format!(
                "{command} cannot write {f:?} output (supported: {allowed:?})"
            ))),
        }
    }
}
