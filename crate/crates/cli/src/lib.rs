//! Config-driven front end for `mimo-coverage`: validate a run config,
//! evaluate it over an optional one-parameter sweep and emit a table.

pub mod config;
pub mod model;
pub mod table;

pub use config::{config_hash, load, parse, Diagnostic, Evaluation, Format, ModelKind, RunConfig, Sweep};
pub use table::{Metadata, Row, SweepTable};

use config::point_params;
use mimo_coverage::montecarlo::McOptions;
use model::Model;
use rayon::prelude::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

fn points(cfg: &RunConfig) -> Vec<Option<f64>> {
    match &cfg.sweep {
        Some(s) => s.grid.iter().map(|&x| Some(x)).collect(),
        None => vec![None],
    }
}

fn sweep_target_known(kind: ModelKind, param: &str) -> bool {
    let base = param.split('.').next().unwrap_or(param);
    let base = base.strip_suffix("_db").unwrap_or(base);
    model::known_keys(kind).contains(&base)
}

/// Schema and semantic checks. An empty result means the config is valid.
pub fn validate(cfg: &RunConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if cfg.version != config::SCHEMA_VERSION {
        out.push(Diagnostic::new(
            "version",
            format!("unsupported schema version {} (expected {})", cfg.version, config::SCHEMA_VERSION),
        ));
    }
    if cfg.evaluation.monte_carlo() && cfg.trials == 0 {
        out.push(Diagnostic::new("trials", "Monte Carlo evaluation needs at least one trial"));
    }
    if let Some(s) = &cfg.sweep {
        if !sweep_target_known(cfg.model, &s.param) {
            out.push(Diagnostic::new(
                "sweep.param",
                format!("`{}` is not a parameter of the {} model (known: {})", s.param, tag(&cfg.model), model::known_keys(cfg.model).join(", ")),
            ));
        }
        if s.grid.is_empty() {
            out.push(Diagnostic::new("sweep.grid", "grid must not be empty"));
        } else if s.grid.iter().any(|x| !x.is_finite()) {
            out.push(Diagnostic::new("sweep.grid", "grid values must be finite"));
        } else {
            let up = s.grid.windows(2).all(|w| w[0] < w[1]);
            let down = s.grid.windows(2).all(|w| w[0] > w[1]);
            if !(up || down) {
                out.push(Diagnostic::new("sweep.grid", "grid must be strictly increasing or strictly decreasing"));
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    for x in points(cfg) {
        let d = point_params(cfg, x).and_then(|m| Model::build(cfg.model, &m));
        if let Err(mut d) = d {
            if let (Some(s), Some(x)) = (&cfg.sweep, x) {
                d.message = format!("{} (at {} = {x})", d.message, s.param);
            }
            if !out.contains(&d) {
                out.push(d);
            }
        }
    }
    out
}

fn tag<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

/// Evaluates every sweep point, in parallel, keeping grid order.
pub fn run(cfg: &RunConfig) -> Result<SweepTable, Vec<Diagnostic>> {
    let diags = validate(cfg);
    if !diags.is_empty() {
        return Err(diags);
    }
    let opts = McOptions::new(cfg.trials.max(1), cfg.seed);
    let param = cfg.sweep.as_ref().map(|s| s.param.clone()).unwrap_or_default();
    let per_point: Vec<Vec<Row>> = points(cfg)
        .into_par_iter()
        .map(|x| {
            let model = point_params(cfg, x).and_then(|m| Model::build(cfg.model, &m)).expect("validated");
            model
                .evaluate(cfg.evaluation, &opts)
                .into_iter()
                .map(|e| Row {
                    param: param.clone(),
                    value: x,
                    metric: e.metric,
                    std_err: e.std_err,
                    method: e.method,
                    flag: e.flag,
                    quantity: e.quantity,
                })
                .collect()
        })
        .collect();
    Ok(SweepTable {
        metadata: Metadata {
            config_hash: config_hash(cfg),
            model: tag(&cfg.model),
            evaluation: tag(&cfg.evaluation),
            seed: cfg.seed,
            trials: cfg.trials,
            schema_version: config::SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
        },
        header: table::HEADER.iter().map(|s| s.to_string()).collect(),
        rows: per_point.into_iter().flatten().collect(),
    })
}
