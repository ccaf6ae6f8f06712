//! Browser bindings: a recorded dual genealogy, the right-most ancestor
//! curve against the impact, and sample paths of the left-right pair.
//!
//! Each export returns a JSON string. The `*_json` functions hold the logic
//! and are what the native tests call.

use serde_json::json;
use slfvs_core::experiments::{
    default_upsilon_sweep, run_named, ExperimentName, ExperimentSpec,
};
use slfvs_core::limit::{simulate_lr_pair, LRConfig};
use slfvs_core::rng::{stream, StreamTag};
use slfvs_core::{ModelParams, RadiusMeasure};
use wasm_bindgen::prelude::*;

fn params(n: u32, alpha: f64, upsilon: f64, seed: u32) -> Result<ModelParams, String> {
    let mu = RadiusMeasure::delta(1.0).map_err(|e| e.to_string())?;
    ModelParams::new(u64::from(n), alpha, upsilon, mu, u64::from(seed)).map_err(|e| e.to_string())
}

/// Genealogy of the dual started from `points` (comma separated).
pub fn dual_genealogy_json(
    n: u32,
    alpha: f64,
    upsilon: f64,
    horizon: f64,
    points: &str,
    seed: u32,
) -> Result<String, String> {
    let points = points
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad start point `{s}`")))
        .collect::<Result<Vec<_>, _>>()?;
    let mut spec = ExperimentSpec::defaults(ExperimentName::Simulate);
    spec.params = params(n, alpha, upsilon, seed)?;
    spec.horizon = horizon;
    spec.points = points;
    spec.validate().map_err(|e| e.to_string())?;
    let table = run_named(&spec).map_err(|e| e.to_string())?;
    let genealogy = table
        .attachments
        .iter()
        .find(|a| a.file_name == "genealogy.json")
        .ok_or("no genealogy recorded")?;
    let genealogy: serde_json::Value = serde_json::from_str(&genealogy.contents).map_err(|e| e.to_string())?;
    Ok(json!({ "summary": table.summary, "genealogy": genealogy }).to_string())
}

/// Mean right-most ancestor position at `horizon` for `count` impacts in (0, 1].
pub fn pu_curve_json(
    n: u32,
    alpha: f64,
    count: u32,
    replicates: u32,
    horizon: f64,
    seed: u32,
) -> Result<String, String> {
    let mut spec = ExperimentSpec::defaults(ExperimentName::PuCurve);
    spec.params = params(n, alpha, 1.0, seed)?;
    spec.upsilons = default_upsilon_sweep(count as usize);
    spec.replicates = u64::from(replicates);
    spec.horizon = horizon;
    spec.validate().map_err(|e| e.to_string())?;
    let table = run_named(&spec).map_err(|e| e.to_string())?;
    Ok(table.summary.to_string())
}

/// One left-right pair path with drift `zeta` and variance rate `xi2`.
pub fn lr_pair_json(
    zeta: f64,
    xi2: f64,
    l0: f64,
    r0: f64,
    horizon: f64,
    dt: f64,
    seed: u32,
) -> Result<String, String> {
    let cfg = LRConfig::new(zeta, xi2, dt).map_err(|e| e.to_string())?;
    let mut rng = stream(u64::from(seed), StreamTag::Limit, 0);
    let (l, r) = simulate_lr_pair(l0, r0, horizon, &cfg, &mut rng).map_err(|e| e.to_string())?;
    let times: Vec<f64> = (0..l.len()).map(|k| l.time(k)).collect();
    Ok(json!({ "t": times, "l": l.values, "r": r.values }).to_string())
}

#[wasm_bindgen]
pub fn dual_genealogy(
    n: u32,
    alpha: f64,
    upsilon: f64,
    horizon: f64,
    points: &str,
    seed: u32,
) -> Result<String, JsError> {
    dual_genealogy_json(n, alpha, upsilon, horizon, points, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn pu_curve(n: u32, alpha: f64, count: u32, replicates: u32, horizon: f64, seed: u32) -> Result<String, JsError> {
    pu_curve_json(n, alpha, count, replicates, horizon, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn lr_pair(zeta: f64, xi2: f64, l0: f64, r0: f64, horizon: f64, dt: f64, seed: u32) -> Result<String, JsError> {
    lr_pair_json(zeta, xi2, l0, r0, horizon, dt, seed).map_err(|e| JsError::new(&e))
}
