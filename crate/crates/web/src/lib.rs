//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export returns a JSON string or throws a string describing the
//! rejected input. The `*_json` functions hold the logic and are plain Rust
//! so they can be tested natively.

use idle_otto::scan::{run_grid, run_line, Axis, FixedParams, Observable, ScanParam, ScanSpec};
use idle_otto::tpm::{enumerate_trajectories, scaled_efficiency_distribution, work_distribution};
use idle_otto::{cycle, EngineParams, RegimeLabel};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest grid side the page may request.
pub const MAX_MAP_POINTS: usize = 200;

type Out = Result<String, String>;

fn json<T: Serialize>(value: &T) -> Out {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

fn err(e: idle_otto::Error) -> String {
    e.to_string()
}

#[derive(Serialize)]
struct WorkMap {
    t_min: f64,
    t_max: f64,
    points: usize,
    /// Row-major over (Tc, Th), `null` never appears.
    mean_w: Vec<f64>,
    regime: Vec<u8>,
    regime_names: Vec<&'static str>,
}

/// Mean work and regime over a square (Tc, Th) grid.
pub fn work_map_json(j: f64, hi: f64, hf: f64, t_min: f64, t_max: f64, points: usize) -> Out {
    if !(2..=MAX_MAP_POINTS).contains(&points) {
        return Err(format!("points must lie in [2, {MAX_MAP_POINTS}], got {points}"));
    }
    let spec = ScanSpec::grid(
        FixedParams::fields(hi, hf).coupling(j),
        Axis::linear(ScanParam::TCold, t_min, t_max, points),
        Axis::linear(ScanParam::THot, t_min, t_max, points),
        vec![Observable::MeanW, Observable::Regime],
    )
    .map_err(err)?;
    let grid = run_grid(&spec).map_err(err)?;
    json(&WorkMap {
        t_min,
        t_max,
        points,
        mean_w: grid.cells().iter().map(|c| c.observables.mean_w).collect(),
        regime: grid.cells().iter().map(|c| c.regime().code()).collect(),
        regime_names: RegimeLabel::ALL.iter().map(|r| r.name()).collect(),
    })
}

#[derive(Serialize)]
struct Atoms {
    value: Vec<f64>,
    probability: Vec<f64>,
}

#[derive(Serialize)]
struct EfficiencyView {
    eta_scaled: Atoms,
    work: Atoms,
    eta_th: Option<f64>,
    eta_0: f64,
    eta_c: f64,
    regime: &'static str,
}

fn atoms(d: &idle_otto::tpm::DiscreteDistribution) -> Atoms {
    let (value, probability) = d.support().iter().copied().unzip();
    Atoms { value, probability }
}

/// Scaled efficiency and work distributions with the reference efficiencies.
pub fn efficiency_distribution_json(j: f64, hi: f64, hf: f64, tc: f64, th: f64) -> Out {
    let p = EngineParams::new(j, hi, hf, tc, th).map_err(err)?;
    let td = enumerate_trajectories(&p);
    let o = cycle::observables(&p);
    json(&EfficiencyView {
        eta_scaled: atoms(&scaled_efficiency_distribution(&td).map_err(err)?),
        work: atoms(&work_distribution(&td)),
        eta_th: o.eta_th,
        eta_0: o.eta_0,
        eta_c: o.eta_c,
        regime: o.regime.name(),
    })
}

#[derive(Serialize)]
struct TurCurve {
    t_cold: Vec<f64>,
    /// `null` where the mean work vanishes.
    observed: Vec<Option<f64>>,
    bound: Vec<Option<f64>>,
    engine: Vec<bool>,
}

/// Relative work fluctuation and its lower bound along log-spaced Tc.
pub fn tur_curve_json(j: f64, hi: f64, hf: f64, th: f64, tc_min: f64, tc_max: f64, points: usize) -> Out {
    if !(2..=10_000).contains(&points) {
        return Err(format!("points must lie in [2, 10000], got {points}"));
    }
    let spec = ScanSpec::line(
        FixedParams::fields(hi, hf).coupling(j).t_hot(th),
        Axis::log(ScanParam::TCold, tc_min, tc_max, points),
        vec![Observable::TurObserved, Observable::TurBound],
    )
    .map_err(err)?;
    let line = run_line(&spec).map_err(err)?;
    let cells = line.cells();
    json(&TurCurve {
        t_cold: cells.iter().map(|c| c.x).collect(),
        observed: cells.iter().map(|c| c.value(Observable::TurObserved)).collect(),
        bound: cells.iter().map(|c| c.value(Observable::TurBound)).collect(),
        engine: cells.iter().map(|c| c.is_engine()).collect(),
    })
}

/// All closed-form observables at one point.
pub fn observables_json(j: f64, hi: f64, hf: f64, tc: f64, th: f64) -> Out {
    let p = EngineParams::new(j, hi, hf, tc, th).map_err(err)?;
    json(&cycle::observables(&p))
}

fn throw(r: Out) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = workMap)]
pub fn work_map(j: f64, hi: f64, hf: f64, t_min: f64, t_max: f64, points: usize) -> Result<String, JsValue> {
    throw(work_map_json(j, hi, hf, t_min, t_max, points))
}

#[wasm_bindgen(js_name = efficiencyDistribution)]
pub fn efficiency_distribution(j: f64, hi: f64, hf: f64, tc: f64, th: f64) -> Result<String, JsValue> {
    throw(efficiency_distribution_json(j, hi, hf, tc, th))
}

#[wasm_bindgen(js_name = turCurve)]
pub fn tur_curve(
    j: f64,
    hi: f64,
    hf: f64,
    th: f64,
    tc_min: f64,
    tc_max: f64,
    points: usize,
) -> Result<String, JsValue> {
    throw(tur_curve_json(j, hi, hf, th, tc_min, tc_max, points))
}

#[wasm_bindgen]
pub fn observables(j: f64, hi: f64, hf: f64, tc: f64, th: f64) -> Result<String, JsValue> {
    throw(observables_json(j, hi, hf, tc, th))
}
