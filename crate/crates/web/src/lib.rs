//! wasm-bindgen entry points for the static demo page. Each takes and
//! returns JSON text; the `*_json` functions are plain Rust so they can be
//! tested natively.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use rfo_core::cases::{battery_evaluate, battery_solve, BatteryConfig, BatteryPolicy};
use rfo_core::grf::sample_field;
use rfo_core::grid::GridDomain;
use rfo_core::kernels::{Kernel, MeanSpec};
use rfo_core::measures::{euler_characteristic, excursion_mask, mc_excursion_probability};

const MAX_POINTS: usize = 60;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRequest {
    pub kernel: Kernel,
    /// Points per axis on [0, 1].
    pub points: usize,
    /// 1 or 2.
    pub dims: usize,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct SampleResponse {
    pub coords: Vec<f64>,
    pub samples: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcursionRequest {
    pub kernel: Kernel,
    pub points: usize,
    pub samples: usize,
    pub seed: u64,
    pub threshold: f64,
}

#[derive(Debug, Serialize)]
pub struct ExcursionResponse {
    pub points: usize,
    /// First sample, row-major.
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
    pub euler_characteristic: i64,
    /// Over all samples.
    pub excursion_probability: f64,
    pub mean_euler_characteristic: f64,
}

#[derive(Debug, Serialize)]
pub struct BatteryResponse {
    pub times: Vec<f64>,
    pub deterministic_z_b: f64,
    pub deterministic_cost: f64,
    pub stochastic_z_b: f64,
    pub stochastic_cost: f64,
    /// Deterministic design and policy applied to the sampled prices.
    pub deterministic_policy_cost: f64,
    pub price_samples: Vec<Vec<f64>>,
    pub storage_deterministic: Vec<f64>,
    pub storage_stochastic: Vec<Vec<f64>>,
}

fn grid(points: usize, dims: usize) -> Result<GridDomain, String> {
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie in 2..={MAX_POINTS}"));
    }
    match dims {
        1 => GridDomain::uniform(&[(0.0, 1.0, points)]),
        2 => GridDomain::uniform(&[(0.0, 1.0, points), (0.0, 1.0, points)]),
        _ => return Err("dims must be 1 or 2".into()),
    }
    .map_err(|e| e.to_string())
}

fn parse<T: for<'de> Deserialize<'de>>(req: &str) -> Result<T, String> {
    serde_json::from_str(req).map_err(|e| format!("bad request: {e}"))
}

fn render<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

pub fn sample_json(req: &str) -> Result<String, String> {
    let r: SampleRequest = parse(req)?;
    if r.samples == 0 || r.samples > 20 {
        return Err("samples must lie in 1..=20".into());
    }
    let g = grid(r.points, r.dims)?;
    let ens = sample_field(&r.kernel, &MeanSpec::constant(0.0), &g, r.samples, r.seed).map_err(|e| e.to_string())?;
    render(&SampleResponse { coords: g.axis(0).coords().to_vec(), samples: ens.samples().to_vec() })
}

pub fn excursion_json(req: &str) -> Result<String, String> {
    let r: ExcursionRequest = parse(req)?;
    if r.samples == 0 || r.samples > 200 {
        return Err("samples must lie in 1..=200".into());
    }
    let g = grid(r.points, 2)?;
    let ens = sample_field(&r.kernel, &MeanSpec::constant(0.0), &g, r.samples, r.seed).map_err(|e| e.to_string())?;
    let mut ecs = Vec::with_capacity(ens.len());
    for k in 0..ens.len() {
        let m = excursion_mask(ens.sample(k), &g, r.threshold).map_err(|e| e.to_string())?;
        ecs.push(euler_characteristic(&m).map_err(|e| e.to_string())?);
    }
    let first = excursion_mask(ens.sample(0), &g, r.threshold).map_err(|e| e.to_string())?;
    render(&ExcursionResponse {
        points: r.points,
        values: ens.sample(0).to_vec(),
        mask: first.active().to_vec(),
        euler_characteristic: ecs[0],
        excursion_probability: mc_excursion_probability(&ens, r.threshold),
        mean_euler_characteristic: ecs.iter().sum::<i64>() as f64 / ecs.len() as f64,
    })
}

pub fn battery_json(req: &str) -> Result<String, String> {
    let c: BatteryConfig = parse(req)?;
    if c.samples > 50 || c.points > 97 {
        return Err("the demo allows at most 50 samples and 97 points".into());
    }
    let err = |e: rfo_core::error::Error| e.to_string();
    let (det, _) = battery_solve(&c, true).map_err(err)?;
    let (sto, prices) = battery_solve(&c, false).map_err(err)?;
    let fixed = battery_evaluate(&c, det.z_b, &BatteryPolicy::Fixed(det.y_g[0].clone()), &prices).map_err(err)?;
    render(&BatteryResponse {
        times: det.times.clone(),
        deterministic_z_b: det.z_b,
        deterministic_cost: det.expected_cost,
        stochastic_z_b: sto.z_b,
        stochastic_cost: sto.expected_cost,
        deterministic_policy_cost: fixed.expected_cost,
        price_samples: prices.samples().to_vec(),
        storage_deterministic: det.y_b[0].clone(),
        storage_stochastic: sto.y_b.clone(),
    })
}

#[wasm_bindgen]
pub fn sample(req: &str) -> Result<String, JsValue> {
    sample_json(req).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn excursion(req: &str) -> Result<String, JsValue> {
    excursion_json(req).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn battery(req: &str) -> Result<String, JsValue> {
    battery_json(req).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn sample_shape_and_determinism() {
        let req = r#"{"kernel":{"family":"matern","sigma":1,"beta":0.2,"nu":1.5},"points":30,"dims":1,"samples":3,"seed":2}"#;
        let a = sample_json(req).unwrap();
        assert_eq!(a, sample_json(req).unwrap());
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["samples"].as_array().unwrap().len(), 3);
        assert_eq!(v["samples"][0].as_array().unwrap().len(), 30);
        assert!(sample_json(r#"{"kernel":{"family":"linear"},"points":1,"dims":1,"samples":1,"seed":0}"#).is_err());
        assert!(sample_json(r#"{"kernel":{"family":"linear"},"points":5,"dims":3,"samples":1,"seed":0}"#).is_err());
    }

    #[test]
    fn excursion_extremes() {
        let base = r#"{"kernel":{"family":"squared_exponential","sigma":1,"beta":0.3},"points":20,"samples":10,"seed":1,"threshold":"#;
        let low: Value = serde_json::from_str(&excursion_json(&format!("{base}-100}}")).unwrap()).unwrap();
        assert_eq!(low["euler_characteristic"], 1);
        assert_eq!(low["excursion_probability"], 1.0);
        let high: Value = serde_json::from_str(&excursion_json(&format!("{base}100}}")).unwrap()).unwrap();
        assert_eq!(high["euler_characteristic"], 0);
        assert_eq!(high["excursion_probability"], 0.0);
    }

    #[test]
    fn battery_small_run() {
        let v: Value = serde_json::from_str(&battery_json(r#"{"points":13,"samples":5,"seed":3}"#).unwrap()).unwrap();
        assert!(v["stochastic_cost"].as_f64().unwrap() <= v["deterministic_policy_cost"].as_f64().unwrap() + 1e-6);
        assert_eq!(v["times"].as_array().unwrap().len(), 13);
        assert!(battery_json(r#"{"samples":500}"#).is_err());
        assert!(battery_json(r#"{"sampels":5}"#).is_err());
    }
}
