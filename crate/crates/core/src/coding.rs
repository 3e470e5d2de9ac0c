//! Rate coding of scalars into periodic spike trains on a fixed time grid.
//!
//! Step `i` covers the interval `(i * dt, (i + 1) * dt]`, so an event at step
//! `i` happens at time `(i + 1) * dt` and a 3 s window at `dt = 0.01` has
//! steps `0..300` whose last event time is exactly 3.0 s.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack for float round-off when flooring or rounding grid positions.
const GRID_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub dt: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain(format!("dt must be > 0, got {dt}")));
        }
        if n_steps == 0 {
            return Err(Error::domain("grid needs at least one step"));
        }
        Ok(TimeGrid { dt, n_steps })
    }

    /// Grid covering `t_window` seconds, `round(t_window / dt)` steps.
    pub fn from_window(dt: f64, t_window: f64) -> Result<Self> {
        if !(t_window.is_finite() && t_window >= dt) {
            return Err(Error::domain(format!(
                "time window {t_window} must be at least one step of {dt}"
            )));
        }
        TimeGrid::new(dt, (t_window / dt).round() as usize)
    }

    pub fn t_window(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    /// Event time of step `i`.
    pub fn time_of(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.dt
    }

    /// Highest frequency the grid can carry, one event per step.
    pub fn max_rate(&self) -> f64 {
        1.0 / self.dt
    }
}

/// Binary events on a time grid, stored as sorted unique step indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeTrain {
    grid: TimeGrid,
    events: Vec<usize>,
}

impl SpikeTrain {
    pub fn empty(grid: TimeGrid) -> Self {
        SpikeTrain {
            grid,
            events: Vec::new(),
        }
    }

    /// Builds a train from strictly increasing, in-range step indices.
    pub fn from_sorted(grid: TimeGrid, events: Vec<usize>) -> Result<Self> {
        if events.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("spike indices must be strictly increasing"));
        }
        if let Some(&last) = events.last() {
            if last >= grid.n_steps {
                return Err(Error::domain(format!(
                    "spike index {last} outside grid of {} steps",
                    grid.n_steps
                )));
            }
        }
        Ok(SpikeTrain { grid, events })
    }

    /// Builds a train from arbitrary indices; duplicates merge.
    pub fn from_unsorted(grid: TimeGrid, mut events: Vec<usize>) -> Result<Self> {
        events.sort_unstable();
        events.dedup();
        SpikeTrain::from_sorted(grid, events)
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn events(&self) -> &[usize] {
        &self.events
    }

    pub fn count(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Dense 0/1 view, one entry per step.
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.grid.n_steps];
        for &i in &self.events {
            out[i] = 1;
        }
        out
    }

    /// Text form: a `dt=<s> n_steps=<n>` header, then one index per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("dt={} n_steps={}\n", self.grid.dt, self.grid.n_steps);
        for i in &self.events {
            let _ = writeln!(s, "{i}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |detail: String| Error::Format {
            what: "spike train",
            detail,
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
        let mut dt = None;
        let mut n_steps = None;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("dt", v)) => dt = v.parse::<f64>().ok(),
                Some(("n_steps", v)) => n_steps = v.parse::<usize>().ok(),
                _ => return Err(bad(format!("unexpected header field `{field}`"))),
            }
        }
        let (Some(dt), Some(n_steps)) = (dt, n_steps) else {
            return Err(bad(format!("bad header `{header}`")));
        };
        let grid = TimeGrid::new(dt, n_steps)?;
        let events = lines
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.parse::<usize>().map_err(|e| bad(format!("index `{l}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        SpikeTrain::from_sorted(grid, events)
    }
}

/// Rate of a train over its window, `count / t_window`.
pub fn decode(train: &SpikeTrain) -> f64 {
    train.count() as f64 / train.grid.t_window()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodingConfig {
    pub dt: f64,
    pub t_window: f64,
    /// Hz per unit input.
    pub range_scale: f64,
}

impl Default for CodingConfig {
    fn default() -> Self {
        CodingConfig {
            dt: 0.01,
            t_window: 3.0,
            range_scale: 1.0,
        }
    }
}

impl CodingConfig {
    pub fn new(dt: f64, t_window: f64, range_scale: f64) -> Result<Self> {
        let cfg = CodingConfig {
            dt,
            t_window,
            range_scale,
        };
        cfg.grid()?;
        if !(range_scale.is_finite() && range_scale >= 0.0) {
            return Err(Error::domain(format!(
                "range scale must be >= 0, got {range_scale}"
            )));
        }
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::from_window(self.dt, self.t_window)
    }
}

/// Periodic train at `freq` Hz: nominal events at `j / freq` for
/// `j = 1..=floor(freq * T)`, each snapped to the nearest step (halves round up).
pub fn encode_rate(freq: f64, grid: TimeGrid) -> Result<SpikeTrain> {
    if !(freq.is_finite() && freq >= 0.0) {
        return Err(Error::domain(format!("frequency must be >= 0, got {freq}")));
    }
    if freq * grid.dt > 1.0 + GRID_EPS {
        return Err(Error::domain(format!(
            "frequency {freq} Hz exceeds the grid maximum of {} Hz",
            grid.max_rate()
        )));
    }
    if freq == 0.0 {
        return Ok(SpikeTrain::empty(grid));
    }
    let n = (freq * grid.t_window() + GRID_EPS).floor() as usize;
    let steps_per_spike = 1.0 / (freq * grid.dt);
    let mut events = Vec::with_capacity(n);
    for j in 1..=n {
        let pos = (j as f64 * steps_per_spike + 0.5 + GRID_EPS).floor() as usize;
        let idx = pos.saturating_sub(1).min(grid.n_steps - 1);
        if events.last() != Some(&idx) {
            events.push(idx);
        }
    }
    SpikeTrain::from_sorted(grid, events)
}

/// Encodes a non-negative input `x` at `range_scale * x` Hz.
pub fn encode(x: f64, cfg: &CodingConfig) -> Result<SpikeTrain> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::domain(format!("input must be >= 0, got {x}")));
    }
    encode_rate(cfg.range_scale * x, cfg.grid()?)
}

pub(crate) fn check_same_grid<'a>(
    mut trains: impl Iterator<Item = &'a SpikeTrain>,
) -> Result<Option<TimeGrid>> {
    let Some(first) = trains.next() else {
        return Ok(None);
    };
    let grid = first.grid();
    for t in trains {
        if t.grid() != grid {
            return Err(Error::GridMismatch(format!(
                "dt={} n_steps={} vs dt={} n_steps={}",
                grid.dt,
                grid.n_steps,
                t.grid().dt,
                t.grid().n_steps
            )));
        }
    }
    Ok(Some(grid))
}

/// Per-step charge `sum_i w_i * [train i fires at t]`, summed in input order.
pub fn weighted_charge_sequence(trains: &[SpikeTrain], weights: &[f64]) -> Result<Vec<f64>> {
    if trains.len() != weights.len() {
        return Err(Error::shape(format!(
            "{} trains but {} weights",
            trains.len(),
            weights.len()
        )));
    }
    let Some(grid) = check_same_grid(trains.iter())? else {
        return Err(Error::shape("no input trains"));
    };
    let mut charge = vec![0.0; grid.n_steps];
    accumulate_charge(&mut charge, trains.iter().zip(weights.iter().copied()));
    Ok(charge)
}

pub(crate) fn accumulate_charge<'a>(
    charge: &mut [f64],
    inputs: impl Iterator<Item = (&'a SpikeTrain, f64)>,
) {
    for (train, w) in inputs {
        if w == 0.0 {
            continue;
        }
        for &i in train.events() {
            charge[i] += w;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: f64) -> CodingConfig {
        CodingConfig::new(0.01, 3.0, k).unwrap()
    }

    /// Exact-grid oracle: with integer Hz rates dividing 100, event `j` sits at
    /// step `j * 100 / f - 1` with no rounding involved.
    fn exact_grid_events(f: usize, seconds: usize) -> Vec<usize> {
        (1..=f * seconds).map(|j| j * 100 / f - 1).collect()
    }

    #[test]
    fn zero_input_is_silent() {
        assert!(encode(0.0, &cfg(10.0)).unwrap().is_empty());
    }

    #[test]
    fn ten_hz_train() {
        let t = encode(1.0, &cfg(10.0)).unwrap();
        assert_eq!(t.events(), exact_grid_events(10, 3).as_slice());
        assert_eq!(t.count(), 30);
        let grid = t.grid();
        assert!((grid.time_of(t.events()[0]) - 0.1).abs() < 1e-12);
        assert!((grid.time_of(*t.events().last().unwrap()) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn five_hz_train() {
        let t = encode(0.5, &cfg(10.0)).unwrap();
        assert_eq!(t.events(), exact_grid_events(5, 3).as_slice());
        assert_eq!(t.count(), 15);
    }

    #[test]
    fn snapping_rounds_half_up() {
        // 40 Hz: nominal positions 2.5, 5, 7.5 steps
        let grid = TimeGrid::from_window(0.01, 0.1).unwrap();
        let t = encode_rate(40.0, grid).unwrap();
        assert_eq!(t.events(), &[2, 4, 7, 9]);
    }

    #[test]
    fn rejects_negative_and_too_fast() {
        assert!(encode(-0.1, &cfg(10.0)).is_err());
        let grid = TimeGrid::from_window(0.01, 1.0).unwrap();
        assert!(encode_rate(100.5, grid).is_err());
        assert_eq!(encode_rate(100.0, grid).unwrap().count(), 100);
    }

    #[test]
    fn decode_examples() {
        let g3 = TimeGrid::from_window(0.01, 3.0).unwrap();
        let t = SpikeTrain::from_sorted(g3, (0..30).map(|i| i * 10).collect()).unwrap();
        assert!((decode(&t) - 10.0).abs() < 1e-12);
        assert_eq!(decode(&SpikeTrain::empty(g3)), 0.0);
        let g2 = TimeGrid::from_window(0.01, 2.0).unwrap();
        let t = SpikeTrain::from_sorted(g2, vec![1, 5, 9, 20, 50, 100, 199]).unwrap();
        assert!((decode(&t) - 3.5).abs() < 1e-12);
    }

    #[test]
    fn charge_examples() {
        let c = cfg(1.0);
        let t10 = encode(10.0, &c).unwrap();
        let t20 = encode(20.0, &c).unwrap();

        // 30 events in 3 s at 10 Hz
        let q = weighted_charge_sequence(std::slice::from_ref(&t10), &[0.5]).unwrap();
        assert!((q.iter().sum::<f64>() - 15.0).abs() < 1e-12);

        let q = weighted_charge_sequence(&[t10.clone(), t10.clone()], &[0.3, 0.2]).unwrap();
        assert!(q.iter().all(|&x| x == 0.0 || (x - 0.5).abs() < 1e-15));
        assert!((q.iter().sum::<f64>() - 15.0).abs() < 1e-12);

        let q = weighted_charge_sequence(&[t10, t20], &[0.3, 0.2]).unwrap();
        // per-step oracle: 30 events of 0.3 plus 60 events of 0.2
        assert!((q.iter().sum::<f64>() - 21.0).abs() < 1e-9);
    }

    #[test]
    fn charge_rejects_mismatched_grids() {
        let a = encode_rate(5.0, TimeGrid::from_window(0.01, 3.0).unwrap()).unwrap();
        let b = encode_rate(5.0, TimeGrid::from_window(0.01, 2.0).unwrap()).unwrap();
        assert!(matches!(
            weighted_charge_sequence(&[a.clone(), b], &[1.0, 1.0]),
            Err(Error::GridMismatch(_))
        ));
        assert!(weighted_charge_sequence(&[a], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let t = encode(0.7, &cfg(10.0)).unwrap();
        let text = t.to_text();
        assert!(text.starts_with("dt=0.01 n_steps=300\n"));
        assert_eq!(SpikeTrain::from_text(&text).unwrap(), t);
        assert!(SpikeTrain::from_text("dt=0.01\n1\n").is_err());
        assert!(SpikeTrain::from_text("dt=0.01 n_steps=3\n5\n").is_err());
    }
}
