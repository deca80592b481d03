//! `key = value` run configuration files. Blank lines and text after `#`
//! are ignored; unknown keys and repeated keys are errors.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use pianorbm::composer::ComposeConfig;
use pianorbm::trainer::TrainConfig;

use crate::error::{CliError, CliResult};

/// Environment variable naming the config file used when `--config` is absent.
pub const CONFIG_ENV: &str = "PIANORBM_CONFIG";

pub const KEYS: [&str; 15] = [
    "hidden_units",
    "cd_steps",
    "learning_rate",
    "epochs",
    "batch_size",
    "seed",
    "weight_init_stddev",
    "initial_budget",
    "extension_budget",
    "extensions",
    "hidden_samples",
    "manifest",
    "checkpoint",
    "report",
    "out_prefix",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub train: TrainConfig,
    pub compose: ComposeConfig,
    pub manifest: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub out_prefix: Option<PathBuf>,
}

fn number<T: FromStr>(line: usize, key: &str, value: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("config line {line}: bad value {value:?} for {key}")))
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        Self::parse_relative(text, None)
    }

    /// Parses `text`; relative paths are resolved against `base`.
    pub fn parse_relative(text: &str, base: Option<&Path>) -> CliResult<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| CliError::Usage(format!("config line {line}: expected `key = value`")))?;
            if !KEYS.contains(&key) {
                return Err(CliError::Usage(format!("config line {line}: unknown key {key:?}")));
            }
            if seen.contains(&key) {
                return Err(CliError::Usage(format!("config line {line}: duplicate key {key:?}")));
            }
            seen.push(key);
            let path = || match base {
                Some(dir) => dir.join(value),
                None => PathBuf::from(value),
            };
            match key {
                "hidden_units" => cfg.train.hidden_units = number(line, key, value)?,
                "cd_steps" => cfg.train.cd_steps = number(line, key, value)?,
                "learning_rate" => cfg.train.learning_rate = number(line, key, value)?,
                "epochs" => cfg.train.epochs = number(line, key, value)?,
                "batch_size" => cfg.train.batch_size = number(line, key, value)?,
                "seed" => {
                    let seed = number(line, key, value)?;
                    cfg.train.seed = seed;
                    cfg.compose.seed = seed;
                }
                "weight_init_stddev" => cfg.train.weight_init_stddev = number(line, key, value)?,
                "initial_budget" => cfg.compose.initial_budget = number(line, key, value)?,
                "extension_budget" => cfg.compose.extension_budget = number(line, key, value)?,
                "extensions" => cfg.compose.extensions = number(line, key, value)?,
                "hidden_samples" => cfg.compose.hidden_samples = number(line, key, value)?,
                "manifest" => cfg.manifest = Some(path()),
                "checkpoint" => cfg.checkpoint = Some(path()),
                "report" => cfg.report = Some(path()),
                "out_prefix" => cfg.out_prefix = Some(path()),
                _ => unreachable!("key list checked above"),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::parse_relative(&text, path.parent()).map_err(|e| e.context(path.display()))
    }

    /// The file named by `explicit`, else the environment default, else
    /// built-in defaults.
    pub fn resolve(explicit: Option<&Path>) -> CliResult<Self> {
        match explicit {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }
}
