//! Run configuration: JSON schema, parsing and per-point parameter maps.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    General,
    Hetnet,
    Security,
    Mmwave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation {
    #[default]
    Analytic,
    MonteCarlo,
    Both,
}

impl Evaluation {
    pub fn analytic(self) -> bool {
        self != Evaluation::MonteCarlo
    }

    pub fn monte_carlo(self) -> bool {
        self != Evaluation::Analytic
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub param: String,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    /// `None` or `-` writes to stdout.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn default_trials() -> u64 {
    100_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub model: ModelKind,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    #[serde(default)]
    pub evaluation: Evaluation,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<Output>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn path_string(path: &serde_path_to_error::Path) -> String {
    let s = path.to_string();
    if s == "." {
        "<root>".into()
    } else {
        s
    }
}

/// Parses a config, reporting the failing field and the line/column.
pub fn parse(text: &str) -> Result<RunConfig, Diagnostic> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Diagnostic::new(path_string(e.path()), e.inner().to_string()))
}

pub fn load(path: &Path) -> Result<RunConfig, Diagnostic> {
    let text = std::fs::read_to_string(path).map_err(|e| Diagnostic::new(path.display().to_string(), e.to_string()))?;
    parse(&text)
}

/// Deserializes a model parameter struct, prefixing errors with `parameters.`.
pub fn from_params<T: serde::de::DeserializeOwned>(map: &Map<String, Value>) -> Result<T, Diagnostic> {
    serde_path_to_error::deserialize(Value::Object(map.clone())).map_err(|e| {
        let p = path_string(e.path());
        let field = if p == "<root>" { "parameters".into() } else { format!("parameters.{p}") };
        Diagnostic::new(field, e.inner().to_string())
    })
}

/// SHA-256 of the canonical JSON of everything that affects the numbers.
/// The output destination is excluded.
pub fn config_hash(cfg: &RunConfig) -> String {
    let canonical = RunConfig { output: None, ..cfg.clone() };
    let bytes = serde_json::to_vec(&canonical).expect("config serializes");
    hex::encode(Sha256::digest(bytes))
}

fn number(v: f64) -> Value {
    if v.fract() == 0.0 && v.abs() < 9e15 {
        Value::Number(Number::from(v as i64))
    } else {
        Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
    }
}

/// Sets `name` (or element `i` of an array via `name.i`) to `v`. Setting a
/// `_db` key drops its linear twin and vice versa.
pub fn set_param(map: &mut Map<String, Value>, name: &str, v: f64) -> Result<(), Diagnostic> {
    let field = format!("parameters.{name}");
    if let Some((base, idx)) = name.rsplit_once('.') {
        let i: usize = idx.parse().map_err(|_| Diagnostic::new(&field, "array index must be a non-negative integer"))?;
        let Some(Value::Array(arr)) = map.get_mut(base) else {
            return Err(Diagnostic::new(&field, format!("`{base}` is not an array parameter of this config")));
        };
        let len = arr.len();
        let slot = arr
            .get_mut(i)
            .ok_or_else(|| Diagnostic::new(&field, format!("index {i} out of range for {len} entries")))?;
        *slot = number(v);
        return Ok(());
    }
    match name.strip_suffix("_db") {
        Some(base) => map.remove(base),
        None => map.remove(&format!("{name}_db")),
    };
    map.insert(name.to_string(), number(v));
    Ok(())
}

fn db_value(v: &Value) -> Option<Value> {
    match v {
        Value::Number(n) => n.as_f64().map(|x| number(mimo_coverage::db_to_linear(x))),
        Value::Array(a) => a.iter().map(db_value).collect::<Option<Vec<_>>>().map(Value::Array),
        _ => None,
    }
}

/// Replaces every `x_db` key by `x` in linear scale.
pub fn linearize(map: &Map<String, Value>) -> Result<Map<String, Value>, Diagnostic> {
    let mut out = Map::new();
    for (k, v) in map {
        match k.strip_suffix("_db") {
            Some(base) => {
                if map.contains_key(base) {
                    return Err(Diagnostic::new(format!("parameters.{k}"), format!("both `{base}` and `{k}` are given")));
                }
                let lin = db_value(v)
                    .ok_or_else(|| Diagnostic::new(format!("parameters.{k}"), "dB values must be numbers or arrays of numbers"))?;
                out.insert(base.to_string(), lin);
            }
            None => {
                out.insert(k.clone(), v.clone());
            }
        }
    }
    Ok(out)
}

/// Linear-scale parameters at one sweep point.
pub fn point_params(cfg: &RunConfig, x: Option<f64>) -> Result<Map<String, Value>, Diagnostic> {
    let mut map = cfg.parameters.clone();
    if let (Some(s), Some(x)) = (&cfg.sweep, x) {
        set_param(&mut map, &s.param, x)?;
    }
    linearize(&map)
}
