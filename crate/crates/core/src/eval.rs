//! Equivalence metrics between a spiking network and its ReLU source.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::RunResult;

/// Correlations above this are read as "strongly related". Reported only;
/// nothing passes or fails on it.
pub const STRONG_CORRELATION: f64 = 0.8;

fn is_constant(x: &[f64]) -> bool {
    x.iter().all(|&v| v == x[0])
}

/// Pearson correlation, centred two-pass form.
pub fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::shape(format!("series lengths differ: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::shape("correlation needs at least two points"));
    }
    if is_constant(x) {
        return Err(Error::ZeroVariance { which: "x" });
    }
    if is_constant(y) {
        return Err(Error::ZeroVariance { which: "y" });
    }
    if x == y {
        return Ok(1.0);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance {
            which: if sxx == 0.0 { "x" } else { "y" },
        });
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl Matrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    /// CSV with a header row of column indices and the row index first.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for j in 0..self.cols {
            out.push_str(&format!(",{j}"));
        }
        out.push('\n');
        for i in 0..self.rows {
            out.push_str(&i.to_string());
            for v in self.row(i) {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }

    fn correlations(series: &[Vec<f64>]) -> Result<Matrix> {
        let n = series.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0;
            for j in i + 1..n {
                let r = correlation(&series[i], &series[j])?;
                values[i * n + j] = r;
                values[j * n + i] = r;
            }
        }
        Ok(Matrix { rows: n, cols: n, values })
    }

    /// For a `2n x 2n` matrix of `[snn.., ann..]` series: the `n` entries
    /// pairing each series with its counterpart in the other model.
    pub fn cross_diagonal(&self) -> Vec<f64> {
        let n = self.rows / 2;
        (0..n).map(|i| self.get(i, n + i)).collect()
    }

    pub fn cross_diagonal_mean(&self) -> f64 {
        mean(&self.cross_diagonal())
    }

    /// Mean of the cross-model block excluding its diagonal.
    pub fn cross_off_diagonal_mean(&self) -> f64 {
        let n = self.rows / 2;
        let vals: Vec<f64> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, n + j))
            .collect();
        mean(&vals)
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrices {
    /// Rows and columns are `[snn datum 0.., ann datum 0..]` over kept data.
    pub data: Matrix,
    /// Rows and columns are `[snn neuron 0.., ann neuron 0..]` over kept neurons.
    pub neuron: Matrix,
    pub kept_data: Vec<usize>,
    pub kept_neurons: Vec<usize>,
    /// Data whose output vector is constant in either model.
    pub excluded_data: Vec<usize>,
    /// Neurons whose response is constant across the data in either model.
    pub excluded_neurons: Vec<usize>,
}

/// Correlation matrices along the data and neuron dimensions. Both inputs
/// are `data x neuron`.
pub fn correlation_matrices(snn: &[Vec<f64>], ann: &[Vec<f64>]) -> Result<CorrelationMatrices> {
    if snn.len() != ann.len() || snn.is_empty() {
        return Err(Error::shape(format!("data counts differ or are zero: {} vs {}", snn.len(), ann.len())));
    }
    let n_neurons = snn[0].len();
    if snn.iter().chain(ann).any(|r| r.len() != n_neurons) {
        return Err(Error::shape("rows have differing neuron counts"));
    }

    let column = |m: &[Vec<f64>], j: usize| -> Vec<f64> { m.iter().map(|r| r[j]).collect() };
    let (mut kept_neurons, mut excluded_neurons) = (Vec::new(), Vec::new());
    for j in 0..n_neurons {
        if snn.len() < 2 || is_constant(&column(snn, j)) || is_constant(&column(ann, j)) {
            excluded_neurons.push(j);
        } else {
            kept_neurons.push(j);
        }
    }
    let (mut kept_data, mut excluded_data) = (Vec::new(), Vec::new());
    for d in 0..snn.len() {
        if n_neurons < 2 || is_constant(&snn[d]) || is_constant(&ann[d]) {
            excluded_data.push(d);
        } else {
            kept_data.push(d);
        }
    }

    let data_series: Vec<Vec<f64>> = kept_data
        .iter()
        .map(|&d| snn[d].clone())
        .chain(kept_data.iter().map(|&d| ann[d].clone()))
        .collect();
    let neuron_series: Vec<Vec<f64>> = kept_neurons
        .iter()
        .map(|&j| column(snn, j))
        .chain(kept_neurons.iter().map(|&j| column(ann, j)))
        .collect();

    Ok(CorrelationMatrices {
        data: Matrix::correlations(&data_series)?,
        neuron: Matrix::correlations(&neuron_series)?,
        kept_data,
        kept_neurons,
        excluded_data,
        excluded_neurons,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub n_classes: usize,
    /// `counts[reference][predicted]`.
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.n_classes).map(|i| self.counts[i][i]).sum()
    }

    pub fn agreement(&self) -> f64 {
        self.trace() as f64 / self.total() as f64
    }

    pub fn to_csv(&self) -> String {
        let m = Matrix {
            rows: self.n_classes,
            cols: self.n_classes,
            values: self.counts.iter().flatten().map(|&c| c as f64).collect(),
        };
        m.to_csv()
    }
}

pub fn confusion_matrix(reference: &[usize], predicted: &[usize], n_classes: usize) -> Result<ConfusionMatrix> {
    if reference.len() != predicted.len() {
        return Err(Error::shape(format!(
            "label lists differ in length: {} vs {}",
            reference.len(),
            predicted.len()
        )));
    }
    if reference.is_empty() {
        return Err(Error::shape("no labels"));
    }
    let mut counts = vec![vec![0; n_classes]; n_classes];
    for (&r, &p) in reference.iter().zip(predicted) {
        for label in [r, p] {
            if label >= n_classes {
                return Err(Error::LabelOutOfRange { label, n_classes });
            }
        }
        counts[r][p] += 1;
    }
    Ok(ConfusionMatrix { n_classes, counts })
}

/// Worst-case decoding error of a rate over a window, in Hz.
pub fn quantization_bound(t_window: f64) -> f64 {
    1.0 / t_window
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantiles {
    pub min: f64,
    pub median: f64,
    pub p90: f64,
    pub max: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl Quantiles {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut s = values.to_vec();
        s.sort_by(f64::total_cmp);
        Some(Quantiles {
            min: s[0],
            median: quantile_sorted(&s, 0.5),
            p90: quantile_sorted(&s, 0.9),
            max: s[s.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub errors: Vec<f64>,
    pub bound: f64,
    /// Indices where the error reaches or exceeds the bound.
    pub violations: Vec<usize>,
    pub quantiles: Option<Quantiles>,
}

pub fn error_report(expected: &[f64], decoded: &[f64], t_window: f64) -> Result<ErrorReport> {
    if expected.len() != decoded.len() {
        return Err(Error::shape(format!(
            "rate lists differ in length: {} vs {}",
            expected.len(),
            decoded.len()
        )));
    }
    let bound = quantization_bound(t_window);
    let errors: Vec<f64> = expected.iter().zip(decoded).map(|(a, b)| (a - b).abs()).collect();
    let violations = errors
        .iter()
        .enumerate()
        .filter(|(_, &e)| e >= bound)
        .map(|(i, _)| i)
        .collect();
    Ok(ErrorReport {
        quantiles: Quantiles::of(&errors),
        errors,
        bound,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub off_diagonal_mean: f64,
}

impl CorrelationSummary {
    fn of(m: &Matrix) -> Option<Self> {
        let diag = m.cross_diagonal();
        if diag.is_empty() {
            return None;
        }
        Some(CorrelationSummary {
            mean: mean(&diag),
            min: diag.iter().copied().fold(f64::INFINITY, f64::min),
            max: diag.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            off_diagonal_mean: m.cross_off_diagonal_mean(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// Index into `RunResult::layer_outputs` that was compared.
    pub layer: usize,
    pub n_data: usize,
    /// SNN-vs-ANN correlation of each kept neuron's response across the data.
    pub neuron_correlation: Option<CorrelationSummary>,
    /// SNN-vs-ANN correlation of each kept datum's output vector.
    pub data_correlation: Option<CorrelationSummary>,
    pub strong_correlation_cutoff: f64,
    pub neurons_above_cutoff: usize,
    pub matrices: CorrelationMatrices,
    pub label_agreement: f64,
    pub confusion: ConfusionMatrix,
    /// |SNN rate - ANN activation| over every neuron of the compared layer.
    pub rate_error: Option<Quantiles>,
    pub quantization_bound: f64,
}

/// Compares paired SNN and ANN runs on the same inputs. Labels are checked
/// on the final layer; correlations and rate errors on `layer`.
pub fn equivalence_report(
    snn: &[RunResult],
    ann: &[RunResult],
    layer: usize,
    n_classes: usize,
    t_window: f64,
) -> Result<EquivalenceReport> {
    if snn.len() != ann.len() {
        return Err(Error::shape(format!("run counts differ: {} vs {}", snn.len(), ann.len())));
    }
    let pick = |runs: &[RunResult]| -> Result<Vec<Vec<f64>>> {
        runs.iter()
            .map(|r| {
                r.layer_outputs
                    .get(layer)
                    .cloned()
                    .ok_or_else(|| Error::shape(format!("run has no layer {layer}")))
            })
            .collect()
    };
    let (s, a) = (pick(snn)?, pick(ann)?);
    let matrices = correlation_matrices(&s, &a)?;
    let neuron_correlation = CorrelationSummary::of(&matrices.neuron);
    let neurons_above_cutoff = matrices
        .neuron
        .cross_diagonal()
        .iter()
        .filter(|&&r| r > STRONG_CORRELATION)
        .count();
    let ann_labels: Vec<usize> = ann.iter().map(|r| r.label).collect();
    let snn_labels: Vec<usize> = snn.iter().map(|r| r.label).collect();
    let confusion = confusion_matrix(&ann_labels, &snn_labels, n_classes)?;
    let errors: Vec<f64> = s
        .iter()
        .flatten()
        .zip(a.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .collect();
    Ok(EquivalenceReport {
        layer,
        n_data: snn.len(),
        neuron_correlation,
        data_correlation: CorrelationSummary::of(&matrices.data),
        strong_correlation_cutoff: STRONG_CORRELATION,
        neurons_above_cutoff,
        label_agreement: confusion.agreement(),
        confusion,
        rate_error: Quantiles::of(&errors),
        quantization_bound: quantization_bound(t_window),
        matrices,
    })
}
