//! Model-specific parameter maps and evaluation of a single sweep point.

use crate::config::{from_params, Diagnostic, Evaluation, ModelKind};
use mimo_coverage::hetnet::{HetNet, TierParams};
use mimo_coverage::mmwave::{mmwave_coverage_lb, MmWaveParams, Pattern};
use mimo_coverage::montecarlo::{
    mc_connection_outage_with, mc_coverage_general, mc_hetnet_coverage, mc_mmwave_coverage, mc_secrecy_outage, McEstimate,
    McOptions, Nulling,
};
use mimo_coverage::security::{connection_outage, secrecy_capacity, secrecy_outage_ub, SecurityParams};
use mimo_coverage::{coverage_theorem1, CoverageResult, GainLaw, GammaGain, InterfererClass, Radius, Scenario, ServingDistance};
use serde::Deserialize;
use serde_json::{Map, Value};

/// Agreement band, in standard errors, between analytic and simulated values.
pub const AGREEMENT_SIGMAS: f64 = 3.0;

fn one() -> f64 {
    1.0
}

fn one_u32() -> u32 {
    1
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Serving {
    #[default]
    Nearest,
    Fixed,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneralParams {
    alpha: f64,
    gamma: f64,
    /// Interferer density; also the serving density under `nearest`.
    density: f64,
    #[serde(default = "one_u32")]
    signal_shape: u32,
    #[serde(default = "one")]
    signal_scale: f64,
    #[serde(default)]
    noise_power: f64,
    #[serde(default = "one")]
    interferer_shape: f64,
    #[serde(default = "one")]
    interferer_scale: f64,
    #[serde(default)]
    serving: Serving,
    r0: Option<f64>,
    /// Interferer-free disk around the receiver when `serving` is `fixed`.
    #[serde(default)]
    guard: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HetnetParams {
    alpha: f64,
    gamma: f64,
    lambda: Vec<f64>,
    power: Vec<f64>,
    bias: Option<Vec<f64>>,
    antennas: Vec<u32>,
    users: Vec<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SecurityConfig {
    lambda_t: f64,
    lambda_e: f64,
    nt: u32,
    r0: f64,
    alpha: f64,
    #[serde(default)]
    d0: f64,
    mu: f64,
    eps: f64,
    #[serde(default)]
    nulling: Nulling,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MmWaveConfig {
    lambda_t: f64,
    radius: f64,
    nt: u32,
    #[serde(default = "one_u32")]
    nakagami: u32,
    alpha: f64,
    gamma: f64,
    #[serde(default = "half")]
    spacing: f64,
    #[serde(default = "actual")]
    pattern: Pattern,
}

fn actual() -> Pattern {
    Pattern::Actual
}

/// Parameter names a sweep may target (each also accepts a `_db` form).
pub fn known_keys(kind: ModelKind) -> &'static [&'static str] {
    match kind {
        ModelKind::General => &[
            "alpha", "gamma", "density", "signal_shape", "signal_scale", "noise_power", "interferer_shape",
            "interferer_scale", "r0", "guard",
        ],
        ModelKind::Hetnet => &["alpha", "gamma", "lambda", "power", "bias", "antennas", "users"],
        ModelKind::Security => &["lambda_t", "lambda_e", "nt", "r0", "alpha", "d0", "mu", "eps"],
        ModelKind::Mmwave => &["lambda_t", "radius", "nt", "nakagami", "alpha", "gamma", "spacing"],
    }
}

#[derive(Debug, Clone)]
pub enum Model {
    General { scn: Scenario, gamma: f64 },
    Hetnet { net: HetNet, gamma: f64 },
    Security { p: SecurityParams, mu: f64, eps: f64, nulling: Nulling },
    MmWave { p: MmWaveParams, pattern: Pattern },
}

fn check_alpha(alpha: f64) -> Result<(), Diagnostic> {
    if alpha > 2.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Diagnostic::new("parameters.alpha", format!("path-loss exponent must exceed 2 (got {alpha})")))
    }
}

fn check_probability(name: &str, v: f64) -> Result<(), Diagnostic> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Diagnostic::new(format!("parameters.{name}"), format!("probability target must lie in (0, 1) (got {v})")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<(), Diagnostic> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Diagnostic::new(format!("parameters.{name}"), format!("must be positive and finite (got {v})")))
    }
}

fn core<T>(r: mimo_coverage::Result<T>) -> Result<T, Diagnostic> {
    r.map_err(|e| Diagnostic::new("parameters", e.to_string()))
}

impl Model {
    /// Builds and validates a model from linear-scale parameters.
    pub fn build(kind: ModelKind, map: &Map<String, Value>) -> Result<Model, Diagnostic> {
        match kind {
            ModelKind::General => {
                let g: GeneralParams = from_params(map)?;
                check_alpha(g.alpha)?;
                check_positive("gamma", g.gamma)?;
                let (serving, inner) = match g.serving {
                    Serving::Nearest => (ServingDistance::Nearest { density: g.density }, Radius::Scaled(1.0)),
                    Serving::Fixed => {
                        let r0 = g.r0.ok_or_else(|| Diagnostic::new("parameters.r0", "required when serving is `fixed`"))?;
                        (ServingDistance::Fixed { r0 }, Radius::Fixed(g.guard))
                    }
                };
                let scn = Scenario {
                    signal: GammaGain { shape: g.signal_shape, scale: g.signal_scale },
                    alpha: g.alpha,
                    noise_power: g.noise_power,
                    interferers: vec![InterfererClass {
                        density: g.density,
                        inner,
                        outer: Radius::Infinite,
                        gain: GainLaw::Gamma { shape: g.interferer_shape, scale: g.interferer_scale },
                    }],
                    serving,
                };
                core(scn.validate())?;
                Ok(Model::General { scn, gamma: g.gamma })
            }
            ModelKind::Hetnet => {
                let h: HetNetParamsChecked = from_params::<HetnetParams>(map)?.try_into()?;
                Ok(Model::Hetnet { net: core(HetNet::new(h.tiers, h.alpha))?, gamma: h.gamma })
            }
            ModelKind::Security => {
                let s: SecurityConfig = from_params(map)?;
                check_alpha(s.alpha)?;
                check_probability("mu", s.mu)?;
                check_probability("eps", s.eps)?;
                let p = SecurityParams { lambda_t: s.lambda_t, lambda_e: s.lambda_e, nt: s.nt, r0: s.r0, d0: s.d0, alpha: s.alpha };
                core(p.validate())?;
                Ok(Model::Security { p, mu: s.mu, eps: s.eps, nulling: s.nulling })
            }
            ModelKind::Mmwave => {
                let m: MmWaveConfig = from_params(map)?;
                check_alpha(m.alpha)?;
                check_positive("gamma", m.gamma)?;
                let p = MmWaveParams {
                    lambda_t: m.lambda_t,
                    radius: m.radius,
                    nt: m.nt,
                    nakagami: m.nakagami,
                    alpha: m.alpha,
                    gamma: m.gamma,
                    spacing: m.spacing,
                };
                core(p.validate())?;
                core(p.cosine_scenario())?;
                Ok(Model::MmWave { p, pattern: m.pattern })
            }
        }
    }

    /// All output rows of one sweep point. Numeric failures become rows
    /// flagged `error: ...` rather than aborting.
    pub fn evaluate(&self, eval: Evaluation, opts: &McOptions) -> Vec<Entry> {
        let mc = eval.monte_carlo();
        let both = eval == Evaluation::Both;
        match self {
            Model::General { scn, gamma } => {
                let exact = coverage_theorem1(scn, *gamma);
                coverage_pair(eval, exact, || first(mc_coverage_general(scn, &[*gamma], opts)))
            }
            Model::Hetnet { net, gamma } => {
                coverage_pair(eval, net.coverage(*gamma), || first(mc_hetnet_coverage(net, &[*gamma], opts)))
            }
            Model::MmWave { p, pattern } => {
                let exact = p.cosine_scenario().and_then(|s| coverage_theorem1(&s, p.gamma));
                let mc_est = if mc { Some(mc_mmwave_coverage(p, *pattern, opts)) } else { None };
                let mut out = Vec::new();
                if eval.analytic() {
                    let mut lb = analytic("coverage_lb", mmwave_coverage_lb(p));
                    if let (true, Some(Ok(e)), Some(v)) = (both, &mc_est, lb.metric) {
                        // a lower bound only fails if the simulation sits clearly below it
                        lb.flag = if e.p_hat + AGREEMENT_SIGMAS * e.std_err >= v { "holds" } else { "violated" }.into();
                    }
                    out.push(lb);
                }
                out.extend(coverage_pair(eval, exact, || mc_est.unwrap()));
                out
            }
            Model::Security { p, mu, eps, nulling } => {
                let mut out = Vec::new();
                let sc = match secrecy_capacity(p, p.d0, *mu, *eps) {
                    Ok(sc) => sc,
                    Err(e) => return vec![Entry::failed("secrecy_capacity", "analytic", &e)],
                };
                let flag = if sc.feasible { "ok" } else { "infeasible" };
                out.push(Entry::value("secrecy_capacity", sc.capacity, flag));
                out.push(Entry::value("gamma_l", sc.gamma_l, flag));
                out.push(Entry::value("gamma_e", sc.gamma_e, flag));
                if !mc {
                    return out;
                }
                if !sc.gamma_l.is_finite() || !sc.gamma_e.is_finite() {
                    for q in ["connection_outage", "secrecy_outage"] {
                        out.push(Entry { flag: "infeasible".into(), ..Entry::empty(q, "monte_carlo") });
                    }
                    return out;
                }
                let co = first(mc_connection_outage_with(p, &[sc.gamma_l], opts, *nulling));
                if both {
                    out.push(analytic_value("connection_outage", connection_outage(p, sc.gamma_l)));
                }
                out.push(mc_entry("connection_outage", co, both.then_some(*mu)));
                let so = first(mc_secrecy_outage(p, &[sc.gamma_e], opts));
                if both {
                    let ub = secrecy_outage_ub(p, sc.gamma_e);
                    let mut e = analytic_value("secrecy_outage", ub);
                    e.method = "bound_upper".into();
                    out.push(e);
                }
                let mut e = mc_entry("secrecy_outage", so, None);
                if let (true, Some(p_hat), Some(se)) = (both, e.metric, e.std_err) {
                    e.flag = if p_hat <= eps + AGREEMENT_SIGMAS * se { "within_bound" } else { "exceeds_bound" }.into();
                }
                out.push(e);
                out
            }
        }
    }
}

struct HetNetParamsChecked {
    tiers: Vec<TierParams>,
    alpha: f64,
    gamma: f64,
}

impl TryFrom<HetnetParams> for HetNetParamsChecked {
    type Error = Diagnostic;

    fn try_from(h: HetnetParams) -> Result<Self, Diagnostic> {
        check_alpha(h.alpha)?;
        check_positive("gamma", h.gamma)?;
        let n = h.lambda.len();
        if n == 0 {
            return Err(Diagnostic::new("parameters.lambda", "at least one tier is required"));
        }
        let bias = h.bias.unwrap_or_else(|| vec![1.0; n]);
        for (name, len) in [("power", h.power.len()), ("bias", bias.len()), ("antennas", h.antennas.len()), ("users", h.users.len())] {
            if len != n {
                return Err(Diagnostic::new(format!("parameters.{name}"), format!("expected {n} entries (one per tier), got {len}")));
            }
        }
        for k in 0..n {
            if h.users[k] > h.antennas[k] {
                return Err(Diagnostic::new(
                    format!("parameters.users.{k}"),
                    format!("users per cell must not exceed antennas ({} > {})", h.users[k], h.antennas[k]),
                ));
            }
        }
        let tiers = (0..n)
            .map(|k| TierParams { lambda: h.lambda[k], power: h.power[k], bias: bias[k], antennas: h.antennas[k], users: h.users[k] })
            .collect();
        Ok(Self { tiers, alpha: h.alpha, gamma: h.gamma })
    }
}

/// One output row without the sweep columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub quantity: String,
    pub metric: Option<f64>,
    pub std_err: Option<f64>,
    pub method: String,
    pub flag: String,
}

impl Entry {
    fn empty(quantity: &str, method: &str) -> Self {
        Entry { quantity: quantity.into(), metric: None, std_err: None, method: method.into(), flag: String::new() }
    }

    fn value(quantity: &str, v: f64, flag: &str) -> Self {
        Entry { metric: v.is_finite().then_some(v), flag: flag.into(), ..Entry::empty(quantity, "analytic") }
    }

    fn failed(quantity: &str, method: &str, e: &mimo_coverage::Error) -> Self {
        Entry { flag: format!("error: {e}"), ..Entry::empty(quantity, method) }
    }

    pub fn is_error(&self) -> bool {
        self.flag.starts_with("error")
    }
}

fn first(r: mimo_coverage::Result<Vec<McEstimate>>) -> mimo_coverage::Result<McEstimate> {
    r.map(|v| v[0])
}

fn analytic(quantity: &str, r: mimo_coverage::Result<CoverageResult>) -> Entry {
    match r {
        Ok(c) => {
            let flag = if c.clamped {
                "clamped"
            } else if c.negative_terms {
                "negative_terms"
            } else {
                "ok"
            };
            Entry { metric: Some(c.value), flag: flag.into(), ..Entry::empty(quantity, c.method.as_str()) }
        }
        Err(e) => Entry::failed(quantity, "analytic", &e),
    }
}

fn analytic_value(quantity: &str, r: mimo_coverage::Result<f64>) -> Entry {
    match r {
        Ok(v) => Entry::value(quantity, v, "ok"),
        Err(e) => Entry::failed(quantity, "analytic", &e),
    }
}

fn mc_entry(quantity: &str, r: mimo_coverage::Result<McEstimate>, reference: Option<f64>) -> Entry {
    match r {
        Ok(e) => {
            let flag = match reference {
                Some(v) if e.agrees_with(v, AGREEMENT_SIGMAS) => "agree",
                Some(_) => "disagree",
                None => "ok",
            };
            Entry { metric: Some(e.p_hat), std_err: Some(e.std_err), flag: flag.into(), ..Entry::empty(quantity, "monte_carlo") }
        }
        Err(e) => Entry::failed(quantity, "monte_carlo", &e),
    }
}

fn coverage_pair(
    eval: Evaluation,
    exact: mimo_coverage::Result<CoverageResult>,
    sim: impl FnOnce() -> mimo_coverage::Result<McEstimate>,
) -> Vec<Entry> {
    let mut out = Vec::new();
    let reference = match (&exact, eval) {
        (Ok(c), Evaluation::Both) => Some(c.value),
        _ => None,
    };
    if eval.analytic() {
        out.push(analytic("coverage", exact));
    }
    if eval.monte_carlo() {
        out.push(mc_entry("coverage", sim(), reference));
    }
    out
}
