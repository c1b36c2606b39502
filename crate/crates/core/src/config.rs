//! Run configuration files.
//!
//! TOML with a required `version = 1`, an `[evolution]` table (any
//! [`EvolutionConfig`] field), a `[simulation]` table and any number of
//! `[[scenario]]` entries. Omitted tables take their defaults; an empty
//! scenario list means the standard ten-scenario training set.
//!
//! Any key can be overridden from the environment: `KITENEAT_` followed by
//! the key path with `__` between segments, e.g.
//! `KITENEAT_EVOLUTION__POPULATION_SIZE=20` or
//! `KITENEAT_SIMULATION__FRAME_BUDGET=500`. Values are read as TOML, falling
//! back to a plain string.

use crate::neat::EvolutionConfig;
use crate::scenario::{
    Formation, Scenario, ScenarioError, TrainingSet, DEFAULT_FRAME_BUDGET, DEFAULT_MAP_SIZE,
    DEFAULT_MOVE_SCALE,
};
use crate::sim::{UnitKind, DEFAULT_DT};
use crate::training::DEFAULT_CHECKPOINT_EVERY;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

pub const CONFIG_VERSION: u32 = 1;
pub const ENV_PREFIX: &str = "KITENEAT_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub dt: f64,
    pub map_width: f64,
    pub map_height: f64,
    pub frame_budget: u64,
    pub move_scale: f64,
    pub ranged_unit: UnitKind,
    pub melee_unit: UnitKind,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            dt: DEFAULT_DT,
            map_width: DEFAULT_MAP_SIZE,
            map_height: DEFAULT_MAP_SIZE,
            frame_budget: DEFAULT_FRAME_BUDGET,
            move_scale: DEFAULT_MOVE_SCALE,
            ranged_unit: UnitKind::Vulture,
            melee_unit: UnitKind::Zealot,
        }
    }
}

impl SimulationConfig {
    /// Scenario carrying these settings; formation and counts are placeholders.
    pub fn template(&self) -> Scenario {
        Scenario {
            ranged_unit: self.ranged_unit,
            melee_unit: self.melee_unit,
            map_width: self.map_width,
            map_height: self.map_height,
            frame_budget: self.frame_budget,
            dt: self.dt,
            move_scale: self.move_scale,
            ..Scenario::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioEntry {
    pub formation: Formation,
    pub melee: usize,
    #[serde(default = "default_ranged")]
    pub ranged: usize,
    /// Base spawn seed; defaults to the entry's position in the list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_ranged() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub simulation: SimulationConfig,
    #[serde(default = "default_checkpoint_every")]
    pub checkpoint_every: u32,
    #[serde(default, rename = "scenario", skip_serializing_if = "Vec::is_empty")]
    pub scenarios: Vec<ScenarioEntry>,
}

fn default_checkpoint_every() -> u32 {
    DEFAULT_CHECKPOINT_EVERY
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            version: CONFIG_VERSION,
            evolution: EvolutionConfig::default(),
            simulation: SimulationConfig::default(),
            checkpoint_every: DEFAULT_CHECKPOINT_EVERY,
            scenarios: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn training_set(&self) -> Result<TrainingSet, ScenarioError> {
        let template = self.simulation.template();
        if self.scenarios.is_empty() {
            return Ok(TrainingSet::standard(&template));
        }
        TrainingSet::new(
            self.scenarios
                .iter()
                .enumerate()
                .map(|(i, e)| Scenario {
                    formation: e.formation,
                    ranged_count: e.ranged,
                    melee_count: e.melee,
                    spawn_seed: e.seed.unwrap_or(i as u64),
                    ..template.clone()
                })
                .collect(),
        )
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// A configuration problem, anchored to a line where possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFileError {
    pub path: PathBuf,
    /// 1-based line and column.
    pub location: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for ConfigFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.location {
            Some((line, col)) => {
                write!(f, "{}:{line}:{col}: {}", self.path.display(), self.message)
            }
            None => write!(f, "{}: {}", self.path.display(), self.message),
        }
    }
}

impl std::error::Error for ConfigFileError {}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before
        .rfind('\n')
        .map_or(before.len(), |i| before.len() - i - 1)
        + 1;
    (line, col)
}

/// Line of the first `key = ...` assignment for the last segment of `field`.
fn find_key(text: &str, field: &str) -> Option<(usize, usize)> {
    let key = field.rsplit('.').next()?;
    text.lines().enumerate().find_map(|(i, l)| {
        let trimmed = l.trim_start();
        let rest = trimmed.strip_prefix(key)?;
        rest.trim_start()
            .starts_with('=')
            .then(|| (i + 1, l.len() - trimmed.len() + 1))
    })
}

/// Parses and validates a config text. `env` supplies override variables.
pub fn parse_config<I>(text: &str, path: &Path, env: I) -> Result<RunConfig, ConfigFileError>
where
    I: IntoIterator<Item = (String, String)>,
{
    let err = |location, message: String| ConfigFileError {
        path: path.to_path_buf(),
        location,
        message,
    };
    let mut config: RunConfig = toml::from_str(text).map_err(|e| {
        let loc = e.span().map(|s| line_col(text, s.start));
        err(loc, e.message().to_string())
    })?;

    let overrides: Vec<(String, String)> = env
        .into_iter()
        .filter(|(k, _)| k.starts_with(ENV_PREFIX) && k.len() > ENV_PREFIX.len())
        .collect();
    if !overrides.is_empty() {
        let mut table: toml::Table = toml::from_str(text).expect("parsed above");
        for (key, value) in &overrides {
            apply_override(&mut table, &key[ENV_PREFIX.len()..], value)
                .map_err(|m| err(None, format!("environment {key}: {m}")))?;
        }
        config = table.try_into().map_err(|e: toml::de::Error| {
            err(
                None,
                format!("after environment overrides: {}", e.message()),
            )
        })?;
    }

    if config.version != CONFIG_VERSION {
        return Err(err(
            find_key(text, "version"),
            format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                config.version
            ),
        ));
    }
    config
        .evolution
        .validate()
        .map_err(|e| err(find_key(text, e.field), e.to_string()))?;
    config
        .training_set()
        .map_err(|e| err(find_key(text, "scenario"), e.to_string()))?;
    Ok(config)
}

fn apply_override(table: &mut toml::Table, key: &str, value: &str) -> Result<(), String> {
    let segments: Vec<String> = key.split("__").map(|s| s.to_ascii_lowercase()).collect();
    let (last, parents) = segments.split_last().expect("non-empty key");
    let mut cur = table;
    for seg in parents {
        let entry = cur
            .entry(seg.clone())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| format!("{seg} is not a table"))?;
    }
    let parsed = format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    cur.insert(last.clone(), parsed);
    Ok(())
}

/// Reads `path` and applies overrides from the process environment.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigFileError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigFileError {
        path: path.to_path_buf(),
        location: None,
        message: e.to_string(),
    })?;
    parse_config(&text, path, std::env::vars())
}
