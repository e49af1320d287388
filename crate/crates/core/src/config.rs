//! Configuration files and key overrides.
//!
//! Configs are JSON objects with flat keys. Only the one-shot game keys
//! (`n`, `e0`, `m`, `a`, `g`, `production`) are required; everything else
//! has a default. Overrides address keys by name (`g=0.4`), by dotted path
//! (`production.beta=0.3`), or by the production shorthands `beta`,
//! `kappa` and `family`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::dynamics::{DynParams, DEFAULT_A_BLOWUP, DEFAULT_CONV_TOL, DEFAULT_T_MAX};
use crate::game::GameParams;
use crate::identity::IdentityParams;
use crate::production::ProductionSpec;

pub const DEFAULT_DELTA: f64 = 0.2;
pub const DEFAULT_A_COEF: f64 = 0.5;
pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_P_TOT: f64 = 1.0;
pub const DEFAULT_MAX_POINTS: usize = 1_000_000;
pub const DEFAULT_DRAWS: usize = 200;
pub const DEFAULT_SEED: u64 = 20240917;
pub const DEFAULT_E_STEPS: usize = 500;
pub const DEFAULT_MAX_EFFORT_STEP: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file not found: {0}")]
    MissingFile(String),
    #[error("cannot read config: {0}")]
    Io(String),
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid `{key}`: {constraint}")]
    Constraint { key: String, constraint: String },
}

impl ConfigError {
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::MissingFile(_) => "missing_file",
            ConfigError::Io(_) => "io_error",
            ConfigError::Parse(_) => "parse_error",
            ConfigError::Constraint { .. } => "constraint_violation",
        }
    }

    fn constraint(key: impl Into<String>, constraint: impl Into<String>) -> Self {
        ConfigError::Constraint {
            key: key.into(),
            constraint: constraint.into(),
        }
    }
}

impl From<crate::Error> for ConfigError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::InvalidParam { key, constraint } => ConfigError::constraint(key, constraint),
            other => ConfigError::constraint("params", other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Plot,
}

/// One sweep axis, either as explicit values or as an inclusive linear
/// range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    Values { name: String, values: Vec<f64> },
    Range { name: String, start: f64, stop: f64, steps: usize },
}

impl AxisSpec {
    pub fn name(&self) -> &str {
        match self {
            AxisSpec::Values { name, .. } | AxisSpec::Range { name, .. } => name,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            AxisSpec::Values { values, .. } => values.clone(),
            AxisSpec::Range { start, stop, steps, .. } => match *steps {
                0 => Vec::new(),
                1 => vec![*start],
                k => {
                    let last = (k - 1) as f64;
                    (0..k)
                        .map(|i| {
                            let i = i as f64;
                            (start * (last - i) + stop * i) / last
                        })
                        .collect()
                }
            },
        }
    }
}

/// A warning attached to an accepted config.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "warning[{}]: {}", self.code, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynSettings {
    pub delta: f64,
    pub a_coef: f64,
    pub t_max: usize,
    pub conv_tol: f64,
    pub a_blowup: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSettings {
    pub draws: usize,
    pub seed: u64,
    pub e_steps: usize,
    pub max_effort_step: f64,
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub game: GameParams,
    pub dynamics: DynSettings,
    pub alpha: f64,
    pub p_tot: f64,
    pub axes: Vec<AxisSpec>,
    pub format: OutputFormat,
    pub max_points: usize,
    pub oracle: OracleSettings,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: Option<u32>,
    e0: Option<f64>,
    m: Option<f64>,
    a: Option<f64>,
    g: Option<f64>,
    production: Option<ProductionSpec>,
    delta: Option<f64>,
    a_coef: Option<f64>,
    t_max: Option<usize>,
    conv_tol: Option<f64>,
    a_blowup: Option<f64>,
    alpha: Option<f64>,
    p_tot: Option<f64>,
    axes: Option<Vec<AxisSpec>>,
    format: Option<OutputFormat>,
    max_points: Option<usize>,
    draws: Option<usize>,
    seed: Option<u64>,
    e_steps: Option<usize>,
    max_effort_step: Option<f64>,
}

/// Keys that may be overridden or swept with a single number.
pub const NUMERIC_KEYS: [&str; 17] = [
    "n",
    "e0",
    "m",
    "a",
    "g",
    "production.beta",
    "production.kappa",
    "delta",
    "a_coef",
    "t_max",
    "conv_tol",
    "a_blowup",
    "alpha",
    "p_tot",
    "draws",
    "seed",
    "e_steps",
];

fn canonical_key(key: &str) -> &str {
    match key {
        "beta" => "production.beta",
        "kappa" => "production.kappa",
        "family" => "production.family",
        other => other,
    }
}

fn required<T>(v: Option<T>, key: &str) -> Result<T, ConfigError> {
    v.ok_or_else(|| ConfigError::constraint(key, "required key is missing"))
}

impl Config {
    /// Reads, overrides and validates a config file.
    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<(Config, Vec<Warning>), ConfigError> {
        let mut value = read_value(path)?;
        for (k, v) in overrides {
            set_key(&mut value, k, parse_override(v))?;
        }
        Config::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<(Config, Vec<Warning>), ConfigError> {
        let raw: RawConfig =
            serde_json::from_value(value.clone()).map_err(|e| ConfigError::Parse(e.to_string()))?;
        Config::resolve(raw)
    }

    fn resolve(raw: RawConfig) -> Result<(Config, Vec<Warning>), ConfigError> {
        let game = GameParams {
            n: required(raw.n, "n")?,
            e0: required(raw.e0, "e0")?,
            m: required(raw.m, "m")?,
            a: required(raw.a, "a")?,
            g: required(raw.g, "g")?,
            production: required(raw.production, "production")?,
        };
        game.validate()?;

        let dynamics = DynSettings {
            delta: raw.delta.unwrap_or(DEFAULT_DELTA),
            a_coef: raw.a_coef.unwrap_or(DEFAULT_A_COEF),
            t_max: raw.t_max.unwrap_or(DEFAULT_T_MAX),
            conv_tol: raw.conv_tol.unwrap_or(DEFAULT_CONV_TOL),
            a_blowup: raw.a_blowup.unwrap_or(DEFAULT_A_BLOWUP),
        };
        let config = Config {
            game,
            dynamics,
            alpha: raw.alpha.unwrap_or(DEFAULT_ALPHA),
            p_tot: raw.p_tot.unwrap_or(DEFAULT_P_TOT),
            axes: raw.axes.unwrap_or_default(),
            format: raw.format.unwrap_or_default(),
            max_points: raw.max_points.unwrap_or(DEFAULT_MAX_POINTS),
            oracle: OracleSettings {
                draws: raw.draws.unwrap_or(DEFAULT_DRAWS),
                seed: raw.seed.unwrap_or(DEFAULT_SEED),
                e_steps: raw.e_steps.unwrap_or(DEFAULT_E_STEPS),
                max_effort_step: raw.max_effort_step.unwrap_or(DEFAULT_MAX_EFFORT_STEP),
            },
        };
        config.dyn_params().validate()?;
        config.identity_params().validate()?;
        config.validate_sweep()?;
        if config.oracle.e_steps < 2 {
            return Err(ConfigError::constraint("e_steps", "e_steps must be >= 2"));
        }
        if !(config.oracle.max_effort_step > 0.0) {
            return Err(ConfigError::constraint("max_effort_step", "max_effort_step must be > 0"));
        }

        let mut warnings = Vec::new();
        if game.no_commitment_problem() {
            warnings.push(Warning {
                code: "no_commitment_problem",
                message: format!(
                    "e0 = {} >= 1/g = {}: the elite prefer public goods without extending rights",
                    game.e0,
                    1.0 / game.g
                ),
            });
        }
        Ok((config, warnings))
    }

    fn validate_sweep(&self) -> Result<(), ConfigError> {
        if self.axes.len() > 2 {
            return Err(ConfigError::constraint("axes", "at most two sweep axes"));
        }
        let mut points: usize = 1;
        for axis in &self.axes {
            let key = canonical_key(axis.name());
            if !NUMERIC_KEYS.contains(&key) {
                return Err(ConfigError::constraint(
                    "axes",
                    format!("unknown sweep parameter `{}`", axis.name()),
                ));
            }
            let n = axis.values().len();
            if n == 0 {
                return Err(ConfigError::constraint(
                    "axes",
                    format!("axis `{}` has no values", axis.name()),
                ));
            }
            points = points.saturating_mul(n);
        }
        if points > self.max_points {
            return Err(ConfigError::constraint(
                "max_points",
                format!("sweep has {points} points, above the limit of {}", self.max_points),
            ));
        }
        Ok(())
    }

    pub fn dyn_params(&self) -> DynParams {
        DynParams {
            base: self.game,
            delta: self.dynamics.delta,
            a_coef: self.dynamics.a_coef,
            t_max: self.dynamics.t_max,
            conv_tol: self.dynamics.conv_tol,
            a_blowup: self.dynamics.a_blowup,
        }
    }

    pub fn identity_params(&self) -> IdentityParams {
        IdentityParams {
            base: self.game,
            alpha: self.alpha,
            p_tot: self.p_tot,
        }
    }

    /// Every key with its resolved value; feeding this back through
    /// [`Config::from_value`] gives the same config.
    pub fn to_value(&self) -> Value {
        let mut map = Map::new();
        let g = &self.game;
        map.insert("n".into(), g.n.into());
        map.insert("e0".into(), g.e0.into());
        map.insert("m".into(), g.m.into());
        map.insert("a".into(), g.a.into());
        map.insert("g".into(), g.g.into());
        map.insert(
            "production".into(),
            serde_json::to_value(g.production).expect("production serializes"),
        );
        let d = &self.dynamics;
        map.insert("delta".into(), d.delta.into());
        map.insert("a_coef".into(), d.a_coef.into());
        map.insert("t_max".into(), d.t_max.into());
        map.insert("conv_tol".into(), d.conv_tol.into());
        map.insert("a_blowup".into(), d.a_blowup.into());
        map.insert("alpha".into(), self.alpha.into());
        map.insert("p_tot".into(), self.p_tot.into());
        map.insert(
            "axes".into(),
            serde_json::to_value(&self.axes).expect("axes serialize"),
        );
        map.insert(
            "format".into(),
            serde_json::to_value(self.format).expect("format serializes"),
        );
        map.insert("max_points".into(), self.max_points.into());
        let o = &self.oracle;
        map.insert("draws".into(), o.draws.into());
        map.insert("seed".into(), o.seed.into());
        map.insert("e_steps".into(), o.e_steps.into());
        map.insert("max_effort_step".into(), o.max_effort_step.into());
        Value::Object(map)
    }
}

pub fn read_value(path: &Path) -> Result<Value, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ConfigError::MissingFile(path.display().to_string()),
        _ => ConfigError::Io(format!("{}: {e}", path.display())),
    })?;
    let value: Value = serde_json::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    if !value.is_object() {
        return Err(ConfigError::Parse("top level must be an object".into()));
    }
    Ok(value)
}

/// Override text as JSON when it parses (numbers, booleans, objects),
/// otherwise as a bare string.
pub fn parse_override(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|_| Value::String(text.to_string()))
}

/// Splits `key=value`.
pub fn split_assignment(text: &str) -> Result<(String, String), ConfigError> {
    match text.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(ConfigError::Parse(format!("expected key=value, got `{text}`"))),
    }
}

/// Number as a JSON value, integral values as integers so that integer keys
/// such as `n` accept them.
pub fn number_value(x: f64) -> Value {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 9.0e15 {
        if x >= 0.0 {
            Value::from(x as u64)
        } else {
            Value::from(x as i64)
        }
    } else {
        Value::from(x)
    }
}

/// Sets `key` (possibly dotted) in a config object.
pub fn set_key(root: &mut Value, key: &str, value: Value) -> Result<(), ConfigError> {
    let key = canonical_key(key);
    let mut parts = key.split('.').peekable();
    let mut node = root;
    while let Some(part) = parts.next() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| ConfigError::constraint(key, "path does not name an object"))?;
        if parts.peek().is_none() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    Err(ConfigError::constraint(key, "empty key"))
}
