//! Single-neuron response sweeps: input-rate curves, slope fits, firing
//! onset, and the decoding-error scan.
//!
//! Every input of the neuron is driven at the same rate, so the drive is
//! `sum(w) * f_in` and the ReLU reference is `k * drive + b`.

use serde::{Deserialize, Serialize};

use crate::coding::{encode_rate, weighted_charge_sequence, TimeGrid};
use crate::error::{Error, Result};
use crate::eval::{quantization_bound, Quantiles};
use crate::mapping::{bias_from_params, min_firing_frequency, slope_from_params, ReluParams};
use crate::neuron::{fire_steps, NeuronParams, ResetMode};

/// The reference single neuron: two inputs weighted 0.3 and 0.2.
pub const REFERENCE_WEIGHTS: [f64; 2] = [0.3, 0.2];

/// Output rate of a neuron whose inputs all fire at `f_in`.
pub fn output_rate(params: &NeuronParams, weights: &[f64], f_in: f64, grid: TimeGrid) -> Result<f64> {
    let train = encode_rate(f_in, grid)?;
    let trains = vec![train; weights.len()];
    let charges = weighted_charge_sequence(&trains, weights)?;
    Ok(fire_steps(params, &charges, grid.dt).len() as f64 / grid.t_window())
}

/// ReLU unit the neuron should realise. A neuron whose summed weight reaches
/// `v_th * c_m` fires on every input event, so its bias is taken as zero.
pub fn reference_relu(params: &NeuronParams, weights: &[f64]) -> ReluParams {
    let sum_w: f64 = weights.iter().sum();
    ReluParams {
        bias: bias_from_params(sum_w, params).unwrap_or(0.0),
        slope: slope_from_params(params),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiPoint {
    pub f_in: f64,
    pub drive: f64,
    pub rate: f64,
    pub relu: f64,
}

pub fn fi_curve(params: &NeuronParams, weights: &[f64], freqs: &[f64], grid: TimeGrid) -> Result<Vec<FiPoint>> {
    let sum_w: f64 = weights.iter().sum();
    let relu = reference_relu(params, weights);
    freqs
        .iter()
        .map(|&f_in| {
            let drive = sum_w * f_in;
            Ok(FiPoint {
                f_in,
                drive,
                rate: output_rate(params, weights, f_in, grid)?,
                relu: relu.activate(drive),
            })
        })
        .collect()
}

/// Least-squares slope of rate against drive over the firing points.
pub fn fit_slope(points: &[FiPoint]) -> Option<f64> {
    let firing: Vec<&FiPoint> = points.iter().filter(|p| p.rate > 0.0).collect();
    if firing.len() < 2 {
        return None;
    }
    let n = firing.len() as f64;
    let mx = firing.iter().map(|p| p.drive).sum::<f64>() / n;
    let my = firing.iter().map(|p| p.rate).sum::<f64>() / n;
    let sxx: f64 = firing.iter().map(|p| (p.drive - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = firing.iter().map(|p| (p.drive - mx) * (p.rate - my)).sum();
    Some(sxy / sxx)
}

/// Euclidean distance between the measured curve and the ReLU reference.
pub fn l2_error(points: &[FiPoint]) -> f64 {
    points.iter().map(|p| (p.rate - p.relu).powi(2)).sum::<f64>().sqrt()
}

/// Smallest rate in `freqs` (taken in ascending order) that makes the
/// neuron fire within the window.
pub fn measured_min_frequency(
    params: &NeuronParams,
    weights: &[f64],
    freqs: &[f64],
    grid: TimeGrid,
) -> Result<Option<f64>> {
    let mut sorted = freqs.to_vec();
    sorted.sort_by(f64::total_cmp);
    for f in sorted {
        if output_rate(params, weights, f, grid)? > 0.0 {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// `1, 2, ..., max` Hz.
pub fn integer_grid(max: u32) -> Vec<f64> {
    (1..=max).map(f64::from).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    FIn,
    GL,
    CM,
    RangeScale,
    TWindow,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [
        SweepAxis::FIn,
        SweepAxis::GL,
        SweepAxis::CM,
        SweepAxis::RangeScale,
        SweepAxis::TWindow,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::FIn => "f_in",
            SweepAxis::GL => "g_l",
            SweepAxis::CM => "c_m",
            SweepAxis::RangeScale => "range_scale",
            SweepAxis::TWindow => "t_window",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown sweep axis `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    /// Values of the swept axis. For `f_in` these are the input rates.
    pub values: Vec<f64>,
    pub neuron: NeuronParams,
    pub weights: Vec<f64>,
    /// Input rates of each curve. Under a `range_scale` sweep they are
    /// rescaled so the largest equals the scale.
    pub freqs: Vec<f64>,
    pub modes: Vec<ResetMode>,
    pub dt: f64,
    pub t_window: f64,
}

impl SweepSpec {
    /// Reference neuron, 1..30 Hz, both reset modes, 3 s window.
    pub fn reference(axis: SweepAxis, values: Vec<f64>) -> Self {
        SweepSpec {
            axis,
            values,
            neuron: NeuronParams::reference(),
            weights: REFERENCE_WEIGHTS.to_vec(),
            freqs: integer_grid(30),
            modes: ResetMode::ALL.to_vec(),
            dt: 0.01,
            t_window: 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::domain("sweep has no axis values"));
        }
        if self.modes.is_empty() {
            return Err(Error::domain("sweep has no reset modes"));
        }
        if self.weights.is_empty() {
            return Err(Error::domain("sweep neuron has no inputs"));
        }
        if self.axis != SweepAxis::FIn && self.freqs.is_empty() {
            return Err(Error::domain("sweep has no input rates"));
        }
        self.neuron.validate()?;
        TimeGrid::from_window(self.dt, self.t_window)?;
        Ok(())
    }

    /// Configuration of one axis value.
    fn configure(&self, value: f64) -> Result<(NeuronParams, Vec<f64>, TimeGrid)> {
        let mut neuron = self.neuron;
        let mut freqs = self.freqs.clone();
        let mut t_window = self.t_window;
        match self.axis {
            SweepAxis::FIn => freqs = self.values.clone(),
            SweepAxis::GL => neuron.g_l = value,
            SweepAxis::CM => neuron.c_m = value,
            SweepAxis::TWindow => t_window = value,
            SweepAxis::RangeScale => {
                if !(value.is_finite() && value > 0.0) {
                    return Err(Error::domain(format!("range scale must be > 0, got {value}")));
                }
                let top = freqs.iter().copied().fold(0.0, f64::max);
                freqs.iter_mut().for_each(|f| *f *= value / top);
            }
        }
        neuron.validate()?;
        Ok((neuron, freqs, TimeGrid::from_window(self.dt, t_window)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// `None` for an `f_in` sweep, whose values are the curve itself.
    pub axis_value: Option<f64>,
    pub reset_mode: ResetMode,
    pub measured_slope: Option<f64>,
    pub measured_min_freq: Option<f64>,
    pub predicted_slope: f64,
    pub predicted_bias: Option<f64>,
    pub predicted_min_freq: Option<f64>,
    pub l2_error: f64,
    pub curve: Vec<FiPoint>,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let axis_values: Vec<Option<f64>> = match spec.axis {
        SweepAxis::FIn => vec![None],
        _ => spec.values.iter().copied().map(Some).collect(),
    };
    let sum_w: f64 = spec.weights.iter().sum();
    let mut rows = Vec::new();
    for value in axis_values {
        let (base, freqs, grid) = spec.configure(value.unwrap_or(f64::NAN))?;
        for &mode in &spec.modes {
            let neuron = base.with_reset(mode);
            let curve = fi_curve(&neuron, &spec.weights, &freqs, grid)?;
            rows.push(SweepRow {
                axis_value: value,
                reset_mode: mode,
                measured_slope: fit_slope(&curve),
                measured_min_freq: curve.iter().find(|p| p.rate > 0.0).map(|p| p.f_in),
                predicted_slope: slope_from_params(&neuron),
                predicted_bias: bias_from_params(sum_w, &neuron).ok(),
                predicted_min_freq: min_firing_frequency(&spec.weights, &neuron, grid.t_window()).ok(),
                l2_error: l2_error(&curve),
                curve,
            });
        }
    }
    Ok(rows)
}

/// One neuron driven by a single periodic input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualFrequencyCase {
    pub params: NeuronParams,
    pub weight: f64,
    pub f_in: f64,
}

const ALIGN_EPS: f64 = 1e-9;

fn is_whole(x: f64) -> bool {
    (x - x.round()).abs() < ALIGN_EPS * x.abs().max(1.0)
}

/// Exact long-run output rate of a [`EqualFrequencyCase`], when the output
/// is periodic and the input fills the window with whole periods.
///
/// Defined for a pure integrator with soft reset (rate `w f / (v_th c_m)`,
/// needing `w <= v_th c_m`), and for reset-to-zero at any leak (rate
/// `f / n`, `n` the input count that first crosses threshold). `None`
/// otherwise, including cases within `1e-9` of a threshold tie.
pub fn analytic_rate(case: &EqualFrequencyCase, grid: TimeGrid) -> Option<f64> {
    let EqualFrequencyCase { params: p, weight, f_in } = *case;
    if !(weight > 0.0 && f_in > 0.0) || f_in > grid.max_rate() {
        return None;
    }
    // input period a whole number of steps, window a whole number of periods
    if !is_whole(1.0 / (f_in * grid.dt)) || !is_whole(f_in * grid.t_window()) {
        return None;
    }
    let q = weight / p.c_m;
    match p.reset_mode {
        ResetMode::LinearReset => (p.g_l == 0.0 && q <= p.v_th).then(|| q * f_in / p.v_th),
        ResetMode::ResetToZero => {
            let d = (-p.g_l / (p.c_m * f_in)).exp();
            let limit = if d < 1.0 { q / (1.0 - d) } else { f64::INFINITY };
            if ((limit - p.v_th) / p.v_th).abs() < ALIGN_EPS {
                return None;
            }
            if limit < p.v_th {
                return Some(0.0);
            }
            let mut v = 0.0;
            for n in 1u64.. {
                v = v * d + q;
                let gap = (v - p.v_th) / p.v_th;
                if gap.abs() < ALIGN_EPS {
                    return None;
                }
                if gap > 0.0 {
                    return Some(f_in / n as f64);
                }
            }
            unreachable!()
        }
    }
}

/// Output rate of a single-input case measured by stepping.
pub fn stepped_rate(case: &EqualFrequencyCase, grid: TimeGrid) -> Result<f64> {
    output_rate(&case.params, &[case.weight], case.f_in, grid)
}

/// Deterministic grid of equal-frequency cases with a defined analytic
/// rate at every window that is a whole number of seconds.
pub fn error_scan_cases() -> Vec<EqualFrequencyCase> {
    let freqs = [1.0, 2.0, 4.0, 5.0, 10.0, 20.0, 25.0, 50.0];
    let weights = [0.15, 0.3, 0.45, 0.6, 0.75, 0.9, 1.0];
    let mut cases = Vec::new();
    for &f_in in &freqs {
        for &weight in &weights {
            for g_l in [0.0, 0.5, 1.0, 3.0] {
                for mode in ResetMode::ALL {
                    if mode == ResetMode::LinearReset && g_l != 0.0 {
                        continue;
                    }
                    let params = NeuronParams { c_m: 1.0, g_l, v_th: 1.0, reset_mode: mode };
                    cases.push(EqualFrequencyCase { params, weight, f_in });
                }
            }
        }
    }
    cases
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorScanRow {
    pub t_window: f64,
    pub n_cases: usize,
    pub median_error: f64,
    pub max_error: f64,
    pub bound: f64,
    pub violations: usize,
}

/// Decoding error `|f - f'|` of every case with a defined analytic rate,
/// per window.
pub fn error_scan(cases: &[EqualFrequencyCase], t_windows: &[f64], dt: f64) -> Result<Vec<ErrorScanRow>> {
    t_windows
        .iter()
        .map(|&t_window| {
            let grid = TimeGrid::from_window(dt, t_window)?;
            let mut errors = Vec::new();
            for case in cases {
                if let Some(f) = analytic_rate(case, grid) {
                    errors.push((f - stepped_rate(case, grid)?).abs());
                }
            }
            let bound = quantization_bound(t_window);
            let q = Quantiles::of(&errors).ok_or_else(|| {
                Error::domain(format!("no case has a defined rate at t_window = {t_window}"))
            })?;
            Ok(ErrorScanRow {
                t_window,
                n_cases: errors.len(),
                median_error: q.median,
                max_error: q.max,
                bound,
                violations: errors.iter().filter(|&&e| e >= bound).count(),
            })
        })
        .collect()
}
