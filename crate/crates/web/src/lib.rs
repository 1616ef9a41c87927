//! Three curves for the browser demo. The plain functions return
//! `Result<Vec<f64>, String>` so they can be tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use mimo_coverage::mmwave::{MmWaveBound, MmWaveParams};
use mimo_coverage::security::{secrecy_capacity, SecurityParams};
use mimo_coverage::{coverage_theorem1, db_to_linear, GainLaw, GammaGain, InterfererClass, Radius, Scenario, ServingDistance};
use wasm_bindgen::prelude::*;

/// Upper limit on points per curve; keeps the page responsive.
pub const MAX_POINTS: usize = 512;

fn check_len(n: usize) -> Result<(), String> {
    if n == 0 || n > MAX_POINTS {
        Err(format!("need between 1 and {MAX_POINTS} points, got {n}"))
    } else {
        Ok(())
    }
}

/// Coverage of the typical user served by its nearest base station, with
/// `signal_shape` spatial streams of gain and Nakagami-`interferer_shape`
/// interference, at each threshold in dB.
pub fn coverage_vs_threshold(alpha: f64, signal_shape: u32, interferer_shape: f64, gammas_db: &[f64]) -> Result<Vec<f64>, String> {
    check_len(gammas_db.len())?;
    let scn = Scenario {
        signal: GammaGain { shape: signal_shape, scale: 1.0 },
        alpha,
        noise_power: 0.0,
        interferers: vec![InterfererClass {
            density: 1e-3,
            inner: Radius::Scaled(1.0),
            outer: Radius::Infinite,
            gain: GainLaw::Gamma { shape: interferer_shape, scale: 1.0 / interferer_shape },
        }],
        serving: ServingDistance::Nearest { density: 1e-3 },
    };
    scn.validate().map_err(|e| e.to_string())?;
    gammas_db
        .iter()
        .map(|&g| coverage_theorem1(&scn, db_to_linear(g)).map(|c| c.value).map_err(|e| e.to_string()))
        .collect()
}

/// mmWave coverage lower bound at each array size.
pub fn mmwave_bound_vs_nt(gamma_db: f64, nakagami: u32, lambda_t: f64, radius: f64, alpha: f64, nts: &[u32]) -> Result<Vec<f64>, String> {
    check_len(nts.len())?;
    let p = MmWaveParams { lambda_t, radius, nt: nts[0].max(1), nakagami, alpha, gamma: db_to_linear(gamma_db), spacing: 0.5 };
    p.validate().map_err(|e| e.to_string())?;
    let bound = MmWaveBound::new(&p).map_err(|e| e.to_string())?;
    nts.iter().map(|&n| bound.at(n).map_err(|e| e.to_string())).collect()
}

/// Secrecy transmission capacity (bit/s/Hz/m²) at each coordination range.
pub fn secrecy_vs_d0(lambda_t: f64, lambda_e: f64, nt: u32, alpha: f64, mu: f64, eps: f64, d0s: &[f64]) -> Result<Vec<f64>, String> {
    check_len(d0s.len())?;
    let p = SecurityParams { lambda_t, lambda_e, nt, r0: 1.0, d0: 0.0, alpha };
    p.validate().map_err(|e| e.to_string())?;
    d0s.iter()
        .map(|&d| secrecy_capacity(&p, d, mu, eps).map(|c| c.capacity).map_err(|e| e.to_string()))
        .collect()
}

fn js(r: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = coverageVsThreshold)]
pub fn coverage_vs_threshold_js(alpha: f64, signal_shape: u32, interferer_shape: f64, gammas_db: Vec<f64>) -> Result<Vec<f64>, JsValue> {
    js(coverage_vs_threshold(alpha, signal_shape, interferer_shape, &gammas_db))
}

#[wasm_bindgen(js_name = mmwaveBoundVsNt)]
pub fn mmwave_bound_vs_nt_js(gamma_db: f64, nakagami: u32, lambda_t: f64, radius: f64, alpha: f64, nts: Vec<u32>) -> Result<Vec<f64>, JsValue> {
    js(mmwave_bound_vs_nt(gamma_db, nakagami, lambda_t, radius, alpha, &nts))
}

#[wasm_bindgen(js_name = secrecyVsD0)]
pub fn secrecy_vs_d0_js(lambda_t: f64, lambda_e: f64, nt: u32, alpha: f64, mu: f64, eps: f64, d0s: Vec<f64>) -> Result<Vec<f64>, JsValue> {
    js(secrecy_vs_d0(lambda_t, lambda_e, nt, alpha, mu, eps, &d0s))
}
