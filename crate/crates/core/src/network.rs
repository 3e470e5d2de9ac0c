//! Feed-forward networks: description, weight binding, ReLU-to-LIF
//! conversion, and layer-at-a-time simulation.
//!
//! A [`NetworkSpec`] is the serialisable description (layer list plus unit
//! parameters); [`Network`] is a spec bound to its weights. The same type
//! serves both models: `Network<ReluParams>` is the ANN and
//! `Network<NeuronParams>` the spiking network.

use serde::{Deserialize, Serialize};

use crate::coding::{encode, CodingConfig, SpikeTrain};
use crate::error::{Error, Result};
use crate::layers::{
    ann_conv, ann_dense, ann_maxpool, conv_forward, dense_forward, maxpool_forward, ConvLayer, DenseLayer,
    KernelShape, PoolLayerSpec, RateVolume, Shape3, SpikeVolume,
};
use crate::mapping::{params_from_relu, ReluParams};
use crate::neuron::{NeuronParams, ResetMode};
use crate::weights::{Tensor, WeightsBundle};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    Relu(Vec<ReluParams>),
    Lif(Vec<NeuronParams>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LayerSpec {
    Dense {
        name: String,
        in_dim: usize,
        out_dim: usize,
        units: Units,
    },
    Conv {
        name: String,
        kernel: KernelShape,
        stride: usize,
        padding: usize,
        units: Units,
    },
    MaxPool {
        window: [usize; 2],
        stride: usize,
    },
    Flatten,
    /// Dropped on binding; classification takes the argmax of the layer below.
    Softmax,
    #[serde(other)]
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub input_shape: Shape3,
    pub layers: Vec<LayerSpec>,
}

impl NetworkSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Per-unit parameters a layer can carry.
pub trait Unit: Clone + Send + Sync + 'static {
    const KIND: &'static str;
    fn select(units: &Units) -> Option<&[Self]>;
    fn wrap(units: Vec<Self>) -> Units;
}

impl Unit for ReluParams {
    const KIND: &'static str = "relu";

    fn select(units: &Units) -> Option<&[Self]> {
        match units {
            Units::Relu(v) => Some(v),
            Units::Lif(_) => None,
        }
    }

    fn wrap(units: Vec<Self>) -> Units {
        Units::Relu(units)
    }
}

impl Unit for NeuronParams {
    const KIND: &'static str = "lif";

    fn select(units: &Units) -> Option<&[Self]> {
        match units {
            Units::Lif(v) => Some(v),
            Units::Relu(_) => None,
        }
    }

    fn wrap(units: Vec<Self>) -> Units {
        Units::Lif(units)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layer<U> {
    Dense { name: String, layer: DenseLayer<U> },
    Conv { name: String, layer: ConvLayer<U> },
    MaxPool(PoolLayerSpec),
    Flatten,
}

impl<U> Layer<U> {
    pub fn name(&self) -> &str {
        match self {
            Layer::Dense { name, .. } | Layer::Conv { name, .. } => name,
            Layer::MaxPool(_) => "max_pool",
            Layer::Flatten => "flatten",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network<U> {
    input_shape: Shape3,
    layers: Vec<Layer<U>>,
    /// Output shape of every layer, in order.
    shapes: Vec<Shape3>,
}

pub type AnnNetwork = Network<ReluParams>;
pub type SnnNetwork = Network<NeuronParams>;

fn units_of<'a, U: Unit>(name: &str, units: &'a Units) -> Result<&'a [U]> {
    U::select(units).ok_or_else(|| Error::Conversion {
        layer: name.to_string(),
        reason: format!("expected `{}` units", U::KIND),
    })
}

fn broadcast<U: Clone>(units: &[U], n: usize, layer: &str) -> Result<Vec<U>> {
    match units.len() {
        1 => Ok(vec![units[0].clone(); n]),
        m if m == n => Ok(units.to_vec()),
        m => Err(Error::shape(format!(
            "layer `{layer}` has {n} units but {m} parameter sets"
        ))),
    }
}

impl<U: Unit> Network<U> {
    pub fn new(input_shape: Shape3, layers: Vec<Layer<U>>) -> Result<Self> {
        if input_shape.is_empty() {
            return Err(Error::shape("input shape is empty"));
        }
        let mut shapes = Vec::with_capacity(layers.len());
        let mut cur = input_shape;
        for layer in &layers {
            cur = match layer {
                Layer::Dense { name, layer } => {
                    if cur.len() != layer.in_dim {
                        return Err(Error::shape(format!(
                            "layer `{name}` expects {} inputs, previous layer gives {cur}",
                            layer.in_dim
                        )));
                    }
                    Shape3::flat(layer.out_dim)
                }
                Layer::Conv { layer, .. } => layer.output_shape(cur)?,
                Layer::MaxPool(p) => p.output_shape(cur)?,
                Layer::Flatten => Shape3::flat(cur.len()),
            };
            shapes.push(cur);
        }
        if !layers.iter().any(|l| matches!(l, Layer::Dense { .. } | Layer::Conv { .. })) {
            return Err(Error::shape("network has no weighted layer"));
        }
        Ok(Network {
            input_shape,
            layers,
            shapes,
        })
    }

    /// Binds a description to its weights. Dense layers read a tensor of shape
    /// `[out_dim, in_dim]`, conv layers `[n_h, n_w, n_c, n_filters]`.
    pub fn bind(spec: &NetworkSpec, bundle: &WeightsBundle) -> Result<Self> {
        let mut layers = Vec::with_capacity(spec.layers.len());
        for (i, l) in spec.layers.iter().enumerate() {
            match l {
                LayerSpec::Dense {
                    name,
                    in_dim,
                    out_dim,
                    units,
                } => {
                    let w = bundle.expect(name, &[*out_dim, *in_dim])?.to_f64();
                    let units = broadcast(units_of::<U>(name, units)?, *out_dim, name)?;
                    layers.push(Layer::Dense {
                        name: name.clone(),
                        layer: DenseLayer::new(*in_dim, *out_dim, w, units)?,
                    });
                }
                LayerSpec::Conv {
                    name,
                    kernel,
                    stride,
                    padding,
                    units,
                } => {
                    let shape = [kernel.n_h, kernel.n_w, kernel.n_c, kernel.n_filters];
                    let w = bundle.expect(name, &shape)?.to_f64();
                    let units = broadcast(units_of::<U>(name, units)?, kernel.n_filters, name)?;
                    layers.push(Layer::Conv {
                        name: name.clone(),
                        layer: ConvLayer::new(*kernel, w, *stride, *padding, units)?,
                    });
                }
                LayerSpec::MaxPool { window, stride } => {
                    layers.push(Layer::MaxPool(PoolLayerSpec::new((window[0], window[1]), *stride)?));
                }
                LayerSpec::Flatten => layers.push(Layer::Flatten),
                LayerSpec::Softmax => {}
                LayerSpec::Unsupported => {
                    return Err(Error::Conversion {
                        layer: format!("#{i}"),
                        reason: "unsupported layer kind".into(),
                    })
                }
            }
        }
        Network::new(spec.input_shape, layers)
    }

    pub fn input_shape(&self) -> Shape3 {
        self.input_shape
    }

    pub fn layers(&self) -> &[Layer<U>] {
        &self.layers
    }

    pub fn layer_shapes(&self) -> &[Shape3] {
        &self.shapes
    }

    pub fn output_len(&self) -> usize {
        self.shapes.last().map_or(0, Shape3::len)
    }

    /// Index of the last layer with weights before the output, if any; the
    /// "hidden layer" of a two-weight-layer MLP.
    pub fn hidden_layer_index(&self) -> Option<usize> {
        let weighted: Vec<usize> = self
            .layers
            .iter()
            .enumerate()
            .filter(|(_, l)| matches!(l, Layer::Dense { .. } | Layer::Conv { .. }))
            .map(|(i, _)| i)
            .collect();
        (weighted.len() >= 2).then(|| weighted[weighted.len() - 2])
    }

    pub fn to_spec(&self) -> NetworkSpec {
        let layers = self
            .layers
            .iter()
            .map(|l| match l {
                Layer::Dense { name, layer } => LayerSpec::Dense {
                    name: name.clone(),
                    in_dim: layer.in_dim,
                    out_dim: layer.out_dim,
                    units: U::wrap(layer.units.clone()),
                },
                Layer::Conv { name, layer } => LayerSpec::Conv {
                    name: name.clone(),
                    kernel: layer.kernel,
                    stride: layer.stride,
                    padding: layer.padding,
                    units: U::wrap(layer.units.clone()),
                },
                Layer::MaxPool(p) => LayerSpec::MaxPool {
                    window: [p.window.0, p.window.1],
                    stride: p.stride,
                },
                Layer::Flatten => LayerSpec::Flatten,
            })
            .collect();
        NetworkSpec {
            input_shape: self.input_shape,
            layers,
        }
    }

    /// Weights as `f32` tensors, in layer order.
    pub fn weights_bundle(&self) -> WeightsBundle {
        let tensors = self
            .layers
            .iter()
            .filter_map(|l| match l {
                Layer::Dense { name, layer } => Some(Tensor {
                    name: name.clone(),
                    kind: "dense".into(),
                    shape: vec![layer.out_dim, layer.in_dim],
                    data: layer.weights.iter().map(|&w| w as f32).collect(),
                }),
                Layer::Conv { name, layer } => Some(Tensor {
                    name: name.clone(),
                    kind: "conv".into(),
                    shape: vec![layer.kernel.n_h, layer.kernel.n_w, layer.kernel.n_c, layer.kernel.n_filters],
                    data: layer.weights.iter().map(|&w| w as f32).collect(),
                }),
                _ => None,
            })
            .collect();
        WeightsBundle { tensors }
    }
}

impl SnnNetwork {
    /// Same network with every neuron switched to `mode`.
    pub fn with_reset(&self, mode: ResetMode) -> Self {
        let mut out = self.clone();
        for l in &mut out.layers {
            match l {
                Layer::Dense { layer, .. } => layer.units.iter_mut().for_each(|u| u.reset_mode = mode),
                Layer::Conv { layer, .. } => layer.units.iter_mut().for_each(|u| u.reset_mode = mode),
                _ => {}
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ConversionMode {
    /// Every neuron gets the same leak; biases must be zero.
    ZeroBias { g_l: f64, v_th: f64 },
    /// Each neuron's bias becomes its membrane conductance.
    BiasToConductance { v_th: f64 },
}

fn convert_units(
    name: &str,
    relu: &[ReluParams],
    weight_sums: &[f64],
    mode: ConversionMode,
) -> Result<Vec<NeuronParams>> {
    let mut bad = Vec::new();
    let mut out = Vec::with_capacity(relu.len());
    for (j, (p, &sum_w)) in relu.iter().zip(weight_sums).enumerate() {
        let converted = match mode {
            ConversionMode::ZeroBias { g_l, v_th } => {
                if p.bias != 0.0 {
                    Err(Error::domain("nonzero bias"))
                } else {
                    NeuronParams::new(1.0 / (p.slope * v_th), g_l, v_th, ResetMode::LinearReset)
                }
            }
            ConversionMode::BiasToConductance { v_th } => params_from_relu(p, sum_w, v_th),
        };
        match converted {
            Ok(n) => out.push(n),
            Err(_) => bad.push(j),
        }
    }
    if bad.is_empty() {
        Ok(out)
    } else {
        Err(Error::MappingDomain {
            layer: name.to_string(),
            units: bad,
        })
    }
}

/// Converts a ReLU network into a linear LIF network. Weights are copied
/// unchanged; only the per-unit parameters are mapped.
pub fn convert(ann: &AnnNetwork, mode: ConversionMode) -> Result<SnnNetwork> {
    let layers = ann
        .layers
        .iter()
        .map(|l| {
            Ok(match l {
                Layer::Dense { name, layer } => {
                    let sums: Vec<f64> = (0..layer.out_dim).map(|j| layer.row(j).iter().sum()).collect();
                    let units = convert_units(name, &layer.units, &sums, mode)?;
                    Layer::Dense {
                        name: name.clone(),
                        layer: DenseLayer::new(layer.in_dim, layer.out_dim, layer.weights.clone(), units)?,
                    }
                }
                Layer::Conv { name, layer } => {
                    let sums: Vec<f64> = (0..layer.kernel.n_filters)
                        .map(|f| layer.filter_weights(f).iter().sum())
                        .collect();
                    let units = convert_units(name, &layer.units, &sums, mode)?;
                    Layer::Conv {
                        name: name.clone(),
                        layer: ConvLayer::new(layer.kernel, layer.weights.clone(), layer.stride, layer.padding, units)?,
                    }
                }
                Layer::MaxPool(p) => Layer::MaxPool(*p),
                Layer::Flatten => Layer::Flatten,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Network::new(ann.input_shape, layers)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_window: f64,
    /// Hz per unit input.
    pub range_scale: f64,
    pub seed: u64,
    /// Reject inputs outside `[0, 1]` instead of clamping them.
    #[serde(default)]
    pub strict: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 0.01,
            t_window: 3.0,
            range_scale: 1.0,
            seed: 0,
            strict: false,
        }
    }
}

impl SimConfig {
    pub fn coding(&self) -> Result<CodingConfig> {
        CodingConfig::new(self.dt, self.t_window, self.range_scale)
    }

    pub fn with_window(mut self, t_window: f64) -> Self {
        self.t_window = t_window;
        self
    }

    fn prepare_input(&self, input: &[f64], expected: usize) -> Result<Vec<f64>> {
        if input.len() != expected {
            return Err(Error::shape(format!(
                "network takes {expected} inputs, got {}",
                input.len()
            )));
        }
        input
            .iter()
            .map(|&x| {
                if !x.is_finite() {
                    Err(Error::domain(format!("input {x} is not finite")))
                } else if self.strict && !(0.0..=1.0).contains(&x) {
                    Err(Error::domain(format!("input {x} outside [0, 1]")))
                } else {
                    Ok(x.clamp(0.0, 1.0))
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    /// Decoded rates (spiking) or activations (ReLU) after every layer.
    pub layer_outputs: Vec<Vec<f64>>,
    /// Spike count of every output neuron; empty for ReLU runs.
    pub output_counts: Vec<usize>,
    pub label: usize,
}

/// Index of the largest value; ties go to the smallest index.
pub fn argmax_first<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Encodes the input and runs every layer over the full window. Element 0
/// is the encoded input; element `i + 1` is the output of layer `i`.
pub fn snn_volumes(snn: &SnnNetwork, input: &[f64], cfg: &SimConfig) -> Result<Vec<SpikeVolume>> {
    let coding = cfg.coding()?;
    let x = cfg.prepare_input(input, snn.input_shape.len())?;
    let trains = x
        .iter()
        .map(|&v| encode(v, &coding))
        .collect::<Result<Vec<SpikeTrain>>>()?;
    let mut volumes = vec![SpikeVolume::new(snn.input_shape, trains)?];
    for (layer, &shape) in snn.layers.iter().zip(&snn.shapes) {
        let cur = volumes.last().expect("input volume present");
        let next = match layer {
            Layer::Dense { layer, .. } => SpikeVolume::new(shape, dense_forward(cur.trains(), layer)?)?,
            Layer::Conv { layer, .. } => conv_forward(cur, layer)?,
            Layer::MaxPool(p) => maxpool_forward(cur, p)?,
            Layer::Flatten => cur.clone().flatten(),
        };
        volumes.push(next);
    }
    Ok(volumes)
}

/// Rate-domain forward pass on `range_scale * input`. Element 0 is the
/// scaled input.
pub fn ann_volumes(ann: &AnnNetwork, input: &[f64], cfg: &SimConfig) -> Result<Vec<RateVolume>> {
    let x = cfg.prepare_input(input, ann.input_shape.len())?;
    let scaled = x.iter().map(|v| v * cfg.range_scale).collect();
    let mut volumes = vec![RateVolume::new(ann.input_shape, scaled)?];
    for (layer, &shape) in ann.layers.iter().zip(&ann.shapes) {
        let cur = volumes.last().expect("input volume present");
        let next = match layer {
            Layer::Dense { layer, .. } => RateVolume::new(shape, ann_dense(&cur.values, layer)?)?,
            Layer::Conv { layer, .. } => ann_conv(cur, layer)?,
            Layer::MaxPool(p) => ann_maxpool(cur, p)?,
            Layer::Flatten => RateVolume::new(shape, cur.values.clone())?,
        };
        volumes.push(next);
    }
    Ok(volumes)
}

pub fn run_snn(snn: &SnnNetwork, input: &[f64], cfg: &SimConfig) -> Result<RunResult> {
    let volumes = snn_volumes(snn, input, cfg)?;
    let output_counts = volumes.last().expect("at least one layer").counts();
    Ok(RunResult {
        label: argmax_first(&output_counts),
        layer_outputs: volumes[1..].iter().map(SpikeVolume::rates).collect(),
        output_counts,
    })
}

pub fn ann_forward(ann: &AnnNetwork, input: &[f64], cfg: &SimConfig) -> Result<RunResult> {
    let mut volumes = ann_volumes(ann, input, cfg)?;
    volumes.remove(0);
    let layer_outputs: Vec<Vec<f64>> = volumes.into_iter().map(|v| v.values).collect();
    let out = layer_outputs.last().expect("at least one layer");
    Ok(RunResult {
        label: argmax_first(out),
        output_counts: Vec::new(),
        layer_outputs,
    })
}

#[cfg(feature = "parallel")]
fn map_batch<T: Send>(inputs: &[Vec<f64>], f: impl Fn(&[f64]) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    use rayon::prelude::*;
    inputs.par_iter().map(|x| f(x)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_batch<T: Send>(inputs: &[Vec<f64>], f: impl Fn(&[f64]) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    inputs.iter().map(|x| f(x)).collect()
}

/// [`run_snn`] over a batch; results come back in input order.
pub fn run_snn_batch(snn: &SnnNetwork, inputs: &[Vec<f64>], cfg: &SimConfig) -> Result<Vec<RunResult>> {
    map_batch(inputs, |x| run_snn(snn, x, cfg))
}

pub fn ann_forward_batch(ann: &AnnNetwork, inputs: &[Vec<f64>], cfg: &SimConfig) -> Result<Vec<RunResult>> {
    map_batch(inputs, |x| ann_forward(ann, x, cfg))
}
