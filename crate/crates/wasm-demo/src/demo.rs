//! Plain-Rust halves of the exported functions, so they can be tested
//! without a JavaScript host.

use serde::Serialize;

use linlif::mapping::{bias_table_literal, map_relu};
use linlif::sweep::fi_curve;
use linlif::{
    bias_from_params, encode_rate, run, slope_from_params, NeuronParams, ReluParams, ResetMode, Result, TimeGrid,
};

pub fn reset_mode(reset_to_zero: bool) -> ResetMode {
    if reset_to_zero {
        ResetMode::ResetToZero
    } else {
        ResetMode::LinearReset
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceData {
    pub potentials: Vec<f64>,
    pub input_steps: Vec<u32>,
    pub spike_steps: Vec<u32>,
    pub rate: f64,
}

/// One neuron fed a single periodic input of `weight` at `f_in` Hz.
pub fn trace(params: &NeuronParams, weight: f64, f_in: f64, dt: f64, t_window: f64) -> Result<TraceData> {
    let grid = TimeGrid::from_window(dt, t_window)?;
    let input = encode_rate(f_in, grid)?;
    let mut charges = vec![0.0; grid.n_steps];
    for &i in input.events() {
        charges[i] = weight;
    }
    let (spikes, trace) = run(params, &charges, grid)?;
    Ok(TraceData {
        potentials: trace.potentials,
        input_steps: input.events().iter().map(|&i| i as u32).collect(),
        spike_steps: spikes.events().iter().map(|&i| i as u32).collect(),
        rate: linlif::decode(&spikes),
    })
}

/// `[f_in, measured rate, ReLU rate]` triples for `f_in = 1..=f_max` Hz.
pub fn response_curve(params: &NeuronParams, weight: f64, f_max: u32, dt: f64, t_window: f64) -> Result<Vec<f64>> {
    let grid = TimeGrid::from_window(dt, t_window)?;
    let freqs = linlif::sweep::integer_grid(f_max);
    let curve = fi_curve(params, &[weight], &freqs, grid)?;
    Ok(curve.iter().flat_map(|p| [p.f_in, p.rate, p.relu]).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct Mapping {
    pub c_m: f64,
    pub g_l: f64,
    pub v_th: f64,
    pub residual: f64,
    /// Bias recovered from the neuron, and the same with the sign the
    /// mapping table prints.
    pub bias_back: f64,
    pub bias_table_literal: f64,
    pub slope_back: f64,
}

pub fn map(bias: f64, slope: f64, sum_w: f64, v_th: f64) -> Result<Mapping> {
    let m = map_relu(&ReluParams::new(bias, slope)?, sum_w, v_th)?;
    Ok(Mapping {
        c_m: m.neuron.c_m,
        g_l: m.neuron.g_l,
        v_th: m.neuron.v_th,
        residual: m.residual,
        bias_back: bias_from_params(sum_w, &m.neuron)?,
        bias_table_literal: bias_table_literal(sum_w, &m.neuron)?,
        slope_back: slope_from_params(&m.neuron),
    })
}
