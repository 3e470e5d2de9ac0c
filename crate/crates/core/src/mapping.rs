//! ReLU reference neuron and its parameter mapping onto the linear LIF neuron.
//!
//! | ReLU              | linear LIF                                         |
//! |-------------------|----------------------------------------------------|
//! | weight `w`        | synaptic weight `w`                                |
//! | bias `b` (<= 0)   | `sum_w / (tau_m * ln(1 - sum_w / (v_th * c_m)))`   |
//! | slope `k`         | `1 / (v_th * c_m)`                                 |
//!
//! The bias is the additive offset inside the rectifier, so a leaky neuron
//! maps to a negative bias whose magnitude is the smallest drive
//! `sum_i w_i * f_i` that can still make it fire.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neuron::{NeuronParams, ResetMode};

/// Bias and slope of a rectified-linear unit. Weights are passed separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReluParams {
    #[serde(default)]
    pub bias: f64,
    #[serde(default = "unit_slope")]
    pub slope: f64,
}

fn unit_slope() -> f64 {
    1.0
}

impl Default for ReluParams {
    fn default() -> Self {
        ReluParams {
            bias: 0.0,
            slope: 1.0,
        }
    }
}

impl ReluParams {
    pub fn new(bias: f64, slope: f64) -> Result<Self> {
        if !(slope.is_finite() && slope > 0.0) {
            return Err(Error::domain(format!("slope must be > 0, got {slope}")));
        }
        if !bias.is_finite() {
            return Err(Error::domain("bias must be finite"));
        }
        Ok(ReluParams { bias, slope })
    }

    /// `k * max(0, drive + b)`.
    pub fn activate(&self, drive: f64) -> f64 {
        self.slope * (drive + self.bias).max(0.0)
    }
}

/// ReLU unit output `k * max(0, sum_i w_i x_i + b)`.
pub fn relu_an(inputs: &[f64], weights: &[f64], p: &ReluParams) -> Result<f64> {
    if inputs.len() != weights.len() {
        return Err(Error::shape(format!(
            "{} inputs but {} weights",
            inputs.len(),
            weights.len()
        )));
    }
    let drive: f64 = inputs.iter().zip(weights).map(|(x, w)| x * w).sum();
    Ok(p.activate(drive))
}

/// ReLU slope realised by a neuron, `1 / (v_th * c_m)`.
pub fn slope_from_params(n: &NeuronParams) -> f64 {
    1.0 / (n.v_th * n.c_m)
}

fn charge_fraction(sum_w: f64, n: &NeuronParams) -> Result<f64> {
    if !(sum_w.is_finite() && sum_w > 0.0) {
        return Err(Error::domain(format!(
            "summed weight must be > 0, got {sum_w}"
        )));
    }
    let x = sum_w / (n.v_th * n.c_m);
    if x >= 1.0 {
        return Err(Error::domain(format!(
            "summed weight {sum_w} reaches v_th * c_m = {}; the neuron fires on a bounded \
             number of spikes at any rate and has no bias equivalent",
            n.v_th * n.c_m
        )));
    }
    Ok(x)
}

/// Bias equivalent to the leak of a neuron with summed input weight `sum_w`,
/// in the long-window limit. Zero for a pure integrator, negative otherwise.
pub fn bias_from_params(sum_w: f64, n: &NeuronParams) -> Result<f64> {
    let x = charge_fraction(sum_w, n)?;
    // sum_w / (tau * ln(1 - x)) with 1/tau = g_l / c_m
    Ok(sum_w * n.g_l / (n.c_m * (-x).ln_1p()))
}

/// The bias expression exactly as the mapping table prints it,
/// `-sum_w / (R_m C_m ln(1 - sum_w / (v_th C_m)))`: the magnitude of
/// [`bias_from_params`] with the opposite sign.
pub fn bias_table_literal(sum_w: f64, n: &NeuronParams) -> Result<f64> {
    bias_from_params(sum_w, n).map(|b| -b)
}

/// Smallest equal input rate (Hz per input) that can fire the neuron within
/// `t_window` seconds.
///
/// Uses the finite-window bound
/// `sum_w * f >= -sum_w / (tau * ln(1 - sum_w * (1 - e^{-T/tau}) / (v_th c_m)))`,
/// which for `g_l = 0` reduces to `f >= v_th c_m / (sum_w T)`.
pub fn min_firing_frequency(weights: &[f64], n: &NeuronParams, t_window: f64) -> Result<f64> {
    let sum_w: f64 = weights.iter().sum();
    if !(t_window.is_finite() && t_window > 0.0) {
        return Err(Error::domain(format!("time window must be > 0, got {t_window}")));
    }
    if !(sum_w.is_finite() && sum_w > 0.0) {
        return Err(Error::domain(format!(
            "summed weight must be > 0, got {sum_w}"
        )));
    }
    let charge_capacity = n.v_th * n.c_m;
    if n.g_l == 0.0 {
        return Ok(charge_capacity / (sum_w * t_window));
    }
    let tau = n.tau_m();
    let x = sum_w * (-(-t_window / tau).exp_m1()) / charge_capacity;
    if x >= 1.0 {
        return Err(Error::domain(format!(
            "summed weight {sum_w} fires the neuron within {t_window} s at any rate"
        )));
    }
    Ok(-1.0 / (tau * (-x).ln_1p()))
}

/// Long-window minimum firing rate, `|bias| / sum_w`.
pub fn asymptotic_min_frequency(sum_w: f64, n: &NeuronParams) -> Result<f64> {
    Ok(-bias_from_params(sum_w, n)? / sum_w)
}

/// Linear LIF parameters realising a ReLU unit with bias `b <= 0` and slope
/// `k`, for a neuron whose input weights sum to `sum_w`. `v_th` is fixed by
/// the caller; `c_m = 1 / (k v_th)`.
pub fn params_from_relu(p: &ReluParams, sum_w: f64, v_th: f64) -> Result<NeuronParams> {
    if !(p.slope.is_finite() && p.slope > 0.0) {
        return Err(Error::domain(format!("slope must be > 0, got {}", p.slope)));
    }
    if !(v_th.is_finite() && v_th > 0.0) {
        return Err(Error::domain(format!("v_th must be > 0, got {v_th}")));
    }
    if p.bias > 0.0 {
        return Err(Error::domain(format!(
            "positive bias {} is unrepresentable: a leaky neuron cannot fire without input",
            p.bias
        )));
    }
    let c_m = 1.0 / (p.slope * v_th);
    let mut n = NeuronParams {
        c_m,
        g_l: 0.0,
        v_th,
        reset_mode: ResetMode::LinearReset,
    };
    let x = charge_fraction(sum_w, &n)?;
    n.g_l = (p.bias * c_m * (-x).ln_1p() / sum_w).max(0.0);
    n.validate()?;
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MappingResult {
    pub neuron: NeuronParams,
    /// Largest relative error when mapping back to `(b, k)`.
    pub residual: f64,
}

fn rel_err(actual: f64, expected: f64) -> f64 {
    let scale = expected.abs().max(f64::MIN_POSITIVE);
    if expected == 0.0 {
        actual.abs()
    } else {
        (actual - expected).abs() / scale
    }
}

/// [`params_from_relu`] plus the round-trip residual through the forward map.
pub fn map_relu(p: &ReluParams, sum_w: f64, v_th: f64) -> Result<MappingResult> {
    let neuron = params_from_relu(p, sum_w, v_th)?;
    let b = bias_from_params(sum_w, &neuron)?;
    let k = slope_from_params(&neuron);
    Ok(MappingResult {
        neuron,
        residual: rel_err(b, p.bias).max(rel_err(k, p.slope)),
    })
}
