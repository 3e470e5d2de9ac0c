//! Browser demo for `www/index.html`. Exports single-neuron simulation
//! and the ReLU-to-LIF parameter mapping.

pub mod demo;

use linlif::NeuronParams;
use wasm_bindgen::prelude::*;

fn js_err(e: linlif::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn neuron(c_m: f64, g_l: f64, v_th: f64, reset_to_zero: bool) -> Result<NeuronParams, JsError> {
    NeuronParams::new(c_m, g_l, v_th, demo::reset_mode(reset_to_zero)).map_err(js_err)
}

#[wasm_bindgen]
pub struct Trace(demo::TraceData);

#[wasm_bindgen]
impl Trace {
    /// Post-reset potential at every step.
    #[wasm_bindgen(getter)]
    pub fn potentials(&self) -> Vec<f64> {
        self.0.potentials.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn input_steps(&self) -> Vec<u32> {
        self.0.input_steps.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn spike_steps(&self) -> Vec<u32> {
        self.0.spike_steps.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn rate(&self) -> f64 {
        self.0.rate
    }
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn membrane_trace(
    c_m: f64,
    g_l: f64,
    v_th: f64,
    reset_to_zero: bool,
    weight: f64,
    f_in: f64,
    dt: f64,
    t_window: f64,
) -> Result<Trace, JsError> {
    let p = neuron(c_m, g_l, v_th, reset_to_zero)?;
    demo::trace(&p, weight, f_in, dt, t_window).map(Trace).map_err(js_err)
}

/// Flat `[f_in, rate, relu, f_in, rate, relu, ...]`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn response_curve(
    c_m: f64,
    g_l: f64,
    v_th: f64,
    reset_to_zero: bool,
    weight: f64,
    f_max: u32,
    dt: f64,
    t_window: f64,
) -> Result<Vec<f64>, JsError> {
    let p = neuron(c_m, g_l, v_th, reset_to_zero)?;
    demo::response_curve(&p, weight, f_max, dt, t_window).map_err(js_err)
}

/// ReLU unit to LIF parameters, as a JSON object.
#[wasm_bindgen]
pub fn map_relu(bias: f64, slope: f64, sum_w: f64, v_th: f64) -> Result<String, JsError> {
    let m = demo::map(bias, slope, sum_w, v_th).map_err(js_err)?;
    serde_json::to_string(&m).map_err(|e| JsError::new(&e.to_string()))
}
