//! Linear leaky-integrate-and-fire neuron on a fixed time grid.
//!
//! Sub-threshold dynamics are integrated exactly: between grid steps the
//! membrane potential decays by `exp(-dt * g_l / c_m)`, and presynaptic
//! spikes arrive as instantaneous jumps of `w / c_m`. Each step runs
//!
//! ```text
//! H = v * decay + charge / c_m
//! S = H >= v_th
//! v = H * (1 - S)          reset to zero
//! v = H - v_th * S         linear (soft) reset
//! ```
//!
//! The rest and reset potential are fixed at zero.

use serde::{Deserialize, Serialize};

use crate::coding::{SpikeTrain, TimeGrid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ResetMode {
    /// Discard the potential on firing.
    ResetToZero,
    /// Subtract the threshold on firing, keeping the residual.
    #[default]
    LinearReset,
}

impl ResetMode {
    pub const ALL: [ResetMode; 2] = [ResetMode::LinearReset, ResetMode::ResetToZero];

    pub fn as_str(self) -> &'static str {
        match self {
            ResetMode::ResetToZero => "reset_to_zero",
            ResetMode::LinearReset => "linear_reset",
        }
    }
}

impl std::str::FromStr for ResetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reset_to_zero" | "zero" | "hard" => Ok(ResetMode::ResetToZero),
            "linear_reset" | "linear" | "soft" => Ok(ResetMode::LinearReset),
            other => Err(Error::domain(format!("unknown reset mode `{other}`"))),
        }
    }
}

/// Membrane parameters of one neuron.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuronParams {
    pub c_m: f64,
    pub g_l: f64,
    pub v_th: f64,
    #[serde(default)]
    pub reset_mode: ResetMode,
}

impl NeuronParams {
    pub fn new(c_m: f64, g_l: f64, v_th: f64, reset_mode: ResetMode) -> Result<Self> {
        let p = NeuronParams {
            c_m,
            g_l,
            v_th,
            reset_mode,
        };
        p.validate()?;
        Ok(p)
    }

    /// The single-neuron configuration used throughout the sweeps:
    /// `c_m = 1`, `g_l = 3`, `v_th = 1`, linear reset.
    pub fn reference() -> Self {
        NeuronParams {
            c_m: 1.0,
            g_l: 3.0,
            v_th: 1.0,
            reset_mode: ResetMode::LinearReset,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_m.is_finite() && self.c_m > 0.0) {
            return Err(Error::domain(format!("c_m must be > 0, got {}", self.c_m)));
        }
        if !(self.g_l.is_finite() && self.g_l >= 0.0) {
            return Err(Error::domain(format!("g_l must be >= 0, got {}", self.g_l)));
        }
        if !(self.v_th.is_finite() && self.v_th > 0.0) {
            return Err(Error::domain(format!("v_th must be > 0, got {}", self.v_th)));
        }
        Ok(())
    }

    pub fn with_reset(mut self, mode: ResetMode) -> Self {
        self.reset_mode = mode;
        self
    }

    /// Resting and reset potential.
    pub const fn v_rest(&self) -> f64 {
        0.0
    }

    /// Membrane time constant `c_m / g_l`; infinite for a pure integrator.
    pub fn tau_m(&self) -> f64 {
        if self.g_l == 0.0 {
            f64::INFINITY
        } else {
            self.c_m / self.g_l
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NeuronState {
    pub v: f64,
    /// Potential before the reset of the most recent step.
    pub last_h: f64,
}

/// Post-reset membrane potential at every step, plus the steps that fired.
#[derive(Debug, Clone, PartialEq)]
pub struct MembraneTrace {
    pub grid: TimeGrid,
    pub potentials: Vec<f64>,
    pub fire_steps: Vec<usize>,
}

impl MembraneTrace {
    /// Rows of `(step, time, potential, fired)`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64, f64, bool)> + '_ {
        let mut fires = self.fire_steps.iter().peekable();
        self.potentials.iter().enumerate().map(move |(i, &v)| {
            let fired = fires.next_if(|&&s| s == i).is_some();
            (i, self.grid.time_of(i), v, fired)
        })
    }
}

/// Inter-step decay factor `exp(-dt * g_l / c_m)`.
pub fn decay_factor(params: &NeuronParams, dt: f64) -> f64 {
    if params.g_l == 0.0 || dt == 0.0 {
        1.0
    } else {
        (-dt * params.g_l / params.c_m).exp()
    }
}

/// Relative slack on the threshold test. Soft reset subtracts `v_th` on every
/// spike, and without slack the accumulated round-off turns exact crossings
/// such as `5 * 0.6 = 3` into misses.
pub const THRESHOLD_REL_EPS: f64 = 1e-12;

#[inline]
fn advance(v: f64, charge: f64, decay: f64, params: &NeuronParams) -> (f64, f64, bool) {
    let h = v * decay + charge / params.c_m;
    let fired = h >= params.v_th * (1.0 - THRESHOLD_REL_EPS);
    let v = match (fired, params.reset_mode) {
        (false, _) => h,
        (true, ResetMode::ResetToZero) => 0.0,
        (true, ResetMode::LinearReset) => h - params.v_th,
    };
    (h, v, fired)
}

/// One grid step: decay, integrate this step's charge, compare, reset.
pub fn step(
    state: NeuronState,
    injected_charge: f64,
    params: &NeuronParams,
    dt: f64,
) -> (NeuronState, bool) {
    let (h, v, fired) = advance(state.v, injected_charge, decay_factor(params, dt), params);
    (NeuronState { v, last_h: h }, fired)
}

/// Simulates a neuron starting at rest and returns the steps that fired.
///
/// Same arithmetic as [`run`] without recording the potential.
pub fn fire_steps(params: &NeuronParams, charges: &[f64], dt: f64) -> Vec<usize> {
    let decay = decay_factor(params, dt);
    let mut v = 0.0;
    let mut out = Vec::new();
    for (i, &q) in charges.iter().enumerate() {
        let (_, next, fired) = advance(v, q, decay, params);
        v = next;
        if fired {
            out.push(i);
        }
    }
    out
}

/// Runs a neuron from rest over a per-step charge sequence.
pub fn run(
    params: &NeuronParams,
    charges: &[f64],
    grid: TimeGrid,
) -> Result<(SpikeTrain, MembraneTrace)> {
    if charges.len() != grid.n_steps {
        return Err(Error::shape(format!(
            "charge sequence has {} steps, grid has {}",
            charges.len(),
            grid.n_steps
        )));
    }
    let decay = decay_factor(params, grid.dt);
    let mut v = 0.0;
    let mut potentials = Vec::with_capacity(charges.len());
    let mut fired_at = Vec::new();
    for (i, &q) in charges.iter().enumerate() {
        let (_, next, fired) = advance(v, q, decay, params);
        v = next;
        potentials.push(v);
        if fired {
            fired_at.push(i);
        }
    }
    let train = SpikeTrain::from_sorted(grid, fired_at.clone())?;
    Ok((
        train,
        MembraneTrace {
            grid,
            potentials,
            fire_steps: fired_at,
        },
    ))
}

/// Membrane potential just after the `n`-th spike of a periodic input train
/// of weight `weight` at `f_in` Hz, starting from rest with no firing.
///
/// `(w / c_m) * (1 - e^{-nT/tau}) / (1 - e^{-T/tau})` with `T = 1 / f_in`,
/// or `n * w / c_m` without leak.
pub fn closed_form_mp(params: &NeuronParams, weight: f64, f_in: f64, n: u32) -> Result<f64> {
    if !(f_in.is_finite() && f_in > 0.0) {
        return Err(Error::domain(format!("input frequency must be > 0, got {f_in}")));
    }
    if n == 0 {
        return Err(Error::domain("spike count must be >= 1"));
    }
    let value = |n: u32| geometric_potential(params, weight, f_in, n);
    if n >= 2 && weight > 0.0 && value(n - 1) >= params.v_th {
        return Err(Error::domain(format!(
            "threshold {} already crossed before input spike {n}",
            params.v_th
        )));
    }
    Ok(value(n))
}

fn geometric_potential(params: &NeuronParams, weight: f64, f_in: f64, n: u32) -> f64 {
    let jump = weight / params.c_m;
    if params.g_l == 0.0 {
        return f64::from(n) * jump;
    }
    let period = 1.0 / f_in;
    let ratio_exp = -period / params.tau_m();
    // 1 - e^x computed as -expm1(x) keeps precision for long time constants.
    jump * (-(f64::from(n) * ratio_exp).exp_m1()) / (-ratio_exp.exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(g_l: f64, mode: ResetMode) -> NeuronParams {
        NeuronParams::new(1.0, g_l, 1.0, mode).unwrap()
    }

    #[test]
    fn decay_factor_identities() {
        assert_eq!(decay_factor(&params(0.0, ResetMode::LinearReset), 0.01), 1.0);
        assert_eq!(decay_factor(&params(3.0, ResetMode::LinearReset), 0.0), 1.0);
        // exp(-0.03) = 0.970445533548508...
        let d = decay_factor(&params(3.0, ResetMode::LinearReset), 0.01);
        assert!((d - 0.970_445_533_548_508).abs() < 1e-12);
    }

    #[test]
    fn step_examples() {
        let p = params(3.0, ResetMode::LinearReset);
        let (s, fired) = step(NeuronState::default(), 0.0, &p, 0.01);
        assert_eq!((s.v, fired), (0.0, false));

        let soft = params(0.0, ResetMode::LinearReset);
        let (s, fired) = step(NeuronState { v: 0.6, last_h: 0.0 }, 0.5, &soft, 0.01);
        assert!(fired);
        assert!((s.v - 0.1).abs() < 1e-12);
        assert!((s.last_h - 1.1).abs() < 1e-12);

        let hard = params(0.0, ResetMode::ResetToZero);
        let (s, fired) = step(NeuronState { v: 0.6, last_h: 0.0 }, 0.5, &hard, 0.01);
        assert!(fired);
        assert_eq!(s.v, 0.0);

        // 0.5 * exp(-0.03) + 0.2
        let (s, fired) = step(NeuronState { v: 0.5, last_h: 0.0 }, 0.2, &p, 0.01);
        assert!(!fired);
        assert!((s.v - 0.685_222_766_774_254).abs() < 1e-9);
    }

    #[test]
    fn threshold_is_inclusive() {
        let p = params(0.0, ResetMode::LinearReset);
        let (s, fired) = step(NeuronState { v: 0.5, last_h: 0.0 }, 0.5, &p, 0.01);
        assert!(fired);
        assert_eq!(s.v, 0.0);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(NeuronParams::new(0.0, 1.0, 1.0, ResetMode::LinearReset).is_err());
        assert!(NeuronParams::new(1.0, -0.1, 1.0, ResetMode::LinearReset).is_err());
        assert!(NeuronParams::new(1.0, 1.0, 0.0, ResetMode::LinearReset).is_err());
        assert!(NeuronParams::new(1.0, 0.0, 1.0, ResetMode::LinearReset).unwrap().tau_m().is_infinite());
    }

    #[test]
    fn closed_form_examples() {
        let integrator = params(0.0, ResetMode::LinearReset);
        assert_eq!(closed_form_mp(&integrator, 0.5, 10.0, 2).unwrap(), 1.0);

        let leaky = params(3.0, ResetMode::LinearReset);
        // 0.5 * (1 - e^-0.6) / (1 - e^-0.3) = 0.5 * (1 + e^-0.3)
        let v2 = closed_form_mp(&leaky, 0.5, 10.0, 2).unwrap();
        assert!((v2 - 0.870_409_110_340_859).abs() < 1e-12, "{v2}");
        assert_eq!(closed_form_mp(&leaky, 0.37, 7.0, 1).unwrap(), 0.37);
    }

    #[test]
    fn closed_form_rejects_bad_inputs() {
        let p = params(0.0, ResetMode::LinearReset);
        assert!(closed_form_mp(&p, 0.5, 0.0, 2).is_err());
        assert!(closed_form_mp(&p, 0.5, 10.0, 0).is_err());
        // 0.6 + 0.6 crosses at spike 2, so spike 3 is not a sub-threshold value
        assert!(closed_form_mp(&p, 0.6, 10.0, 3).is_err());
    }

    #[test]
    fn run_checks_length() {
        let grid = TimeGrid::new(0.01, 10).unwrap();
        assert!(run(&params(1.0, ResetMode::LinearReset), &[0.0; 9], grid).is_err());
    }

    #[test]
    fn trace_rows_mark_fires() {
        let grid = TimeGrid::new(0.01, 4).unwrap();
        let (train, trace) = run(&params(0.0, ResetMode::LinearReset), &[0.6, 0.6, 0.0, 0.9], grid).unwrap();
        assert_eq!(train.events(), &[1, 3]);
        let fired: Vec<bool> = trace.rows().map(|r| r.3).collect();
        assert_eq!(fired, vec![false, true, false, true]);
    }
}
