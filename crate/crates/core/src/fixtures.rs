//! Seeded synthetic networks and datasets.
//!
//! Every generator takes an explicit seed and draws from its own ChaCha
//! stream, so fixtures are reproducible across platforms and runs.
//! Weights are drawn as `f32` so a fixture survives a save/load cycle
//! bit-for-bit.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layers::{ConvLayer, DenseLayer, KernelShape, PoolLayerSpec, Shape3};
use crate::mapping::ReluParams;
use crate::network::{AnnNetwork, Layer, Network};

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn normal_weights(rng: &mut ChaCha8Rng, n: usize, mean: f64, std: f64) -> Vec<f64> {
    let dist = Normal::new(mean, std).expect("std checked by caller");
    (0..n).map(|_| f64::from(dist.sample(rng) as f32)).collect()
}

/// Coding range (Hz per unit input) the MLP fixture is sized for.
pub const MLP_RANGE_SCALE: f64 = 10.0;
/// Coding range the ConvNet fixture is sized for; keeps its conv and output
/// rates between roughly 20 and 70 Hz, under the 100 Hz grid ceiling.
pub const CONVNET_RANGE_SCALE: f64 = 20.0;

/// Normal weight distribution of one layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightDist {
    pub mean: f64,
    pub std: f64,
}

impl WeightDist {
    fn check(&self) -> Result<()> {
        if self.mean.is_finite() && self.std.is_finite() && self.std > 0.0 {
            Ok(())
        } else {
            Err(Error::domain(format!("bad weight distribution {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpFixture {
    /// Layer widths, input first.
    pub dims: Vec<usize>,
    /// One distribution per weight layer.
    pub weights: Vec<WeightDist>,
    /// Leading hidden units of the first layer given all-negative weights,
    /// so they never fire.
    pub dead_hidden: usize,
}

impl Default for MlpFixture {
    /// 64-32-10 with one dead hidden unit.
    fn default() -> Self {
        MlpFixture {
            dims: vec![64, 32, 10],
            weights: vec![
                WeightDist { mean: 0.05, std: 0.3 },
                WeightDist { mean: 0.05, std: 0.3 },
            ],
            dead_hidden: 1,
        }
    }
}

/// Zero-bias ReLU MLP with unit slope.
pub fn random_mlp(spec: &MlpFixture, seed: u64) -> Result<AnnNetwork> {
    if spec.dims.len() < 2 || spec.weights.len() != spec.dims.len() - 1 {
        return Err(Error::shape("an MLP needs n widths and n - 1 weight distributions"));
    }
    if spec.dims.len() > 2 && spec.dead_hidden > spec.dims[1] {
        return Err(Error::shape("more dead units than hidden units"));
    }
    let mut r = rng(seed, 1);
    let mut layers = Vec::new();
    for (i, (pair, dist)) in spec.dims.windows(2).zip(&spec.weights).enumerate() {
        dist.check()?;
        let (n_in, n_out) = (pair[0], pair[1]);
        let mut w = normal_weights(&mut r, n_in * n_out, dist.mean, dist.std);
        if i == 0 && spec.dims.len() > 2 {
            for x in &mut w[..spec.dead_hidden * n_in] {
                *x = -x.abs() - 0.01;
            }
        }
        layers.push(Layer::Dense {
            name: format!("fc{}", i + 1),
            layer: DenseLayer::uniform(n_in, n_out, w, ReluParams::default())?,
        });
    }
    Network::new(Shape3::flat(spec.dims[0]), layers)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvFixture {
    pub input: Shape3,
    pub filters: usize,
    pub kernel: usize,
    pub n_classes: usize,
    pub conv: WeightDist,
    pub dense: WeightDist,
}

impl Default for ConvFixture {
    /// Conv 4@3x3 (same padding), 2x2 max-pool, dense to 10 on 8x8x1.
    fn default() -> Self {
        ConvFixture {
            input: Shape3::new(8, 8, 1),
            filters: 4,
            kernel: 3,
            n_classes: 10,
            conv: WeightDist { mean: 0.1, std: 0.4 },
            dense: WeightDist { mean: 0.025, std: 0.15 },
        }
    }
}

pub fn random_convnet(spec: &ConvFixture, seed: u64) -> Result<AnnNetwork> {
    spec.conv.check()?;
    spec.dense.check()?;
    let mut r = rng(seed, 2);
    let kernel = KernelShape {
        n_h: spec.kernel,
        n_w: spec.kernel,
        n_c: spec.input.c,
        n_filters: spec.filters,
    };
    let conv_w = normal_weights(&mut r, kernel.len(), spec.conv.mean, spec.conv.std);
    let conv = ConvLayer::new(kernel, conv_w, 1, spec.kernel / 2, vec![ReluParams::default(); spec.filters])?;
    let pool = PoolLayerSpec::new((2, 2), 2)?;
    let pooled = pool.output_shape(conv.output_shape(spec.input)?)?;
    let dense_w = normal_weights(&mut r, pooled.len() * spec.n_classes, spec.dense.mean, spec.dense.std);
    let dense = DenseLayer::uniform(pooled.len(), spec.n_classes, dense_w, ReluParams::default())?;
    Network::new(
        spec.input,
        vec![
            Layer::Conv { name: "conv1".into(), layer: conv },
            Layer::MaxPool(pool),
            Layer::Flatten,
            Layer::Dense { name: "fc1".into(), layer: dense },
        ],
    )
}

/// A labelled set of flat samples sharing one shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub shape: Shape3,
    pub samples: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    pub fn take(mut self, n: usize) -> Self {
        self.samples.truncate(n);
        self.labels.truncate(n);
        self
    }
}

/// Uniform `[0, 1]` inputs.
pub fn random_inputs(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed, 3);
    (0..n)
        .map(|_| (0..dim).map(|_| f64::from(r.random::<f32>())).collect())
        .collect()
}

/// Images with one bright Gaussian blob over uniform noise. The blob centre
/// is set by the class, laid out on a ring around the image centre.
pub fn synthetic_images(n: usize, shape: Shape3, n_classes: usize, seed: u64) -> Result<Dataset> {
    if n_classes == 0 || shape.is_empty() {
        return Err(Error::shape("need at least one class and a non-empty image"));
    }
    let mut r = rng(seed, 4);
    let (h, w) = (shape.h as f64, shape.w as f64);
    let radius = 0.3 * h.min(w);
    let mut samples = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let label = r.random_range(0..n_classes);
        let angle = std::f64::consts::TAU * label as f64 / n_classes as f64;
        let cy = (h - 1.0) / 2.0 + radius * angle.sin() + r.random_range(-0.5..0.5);
        let cx = (w - 1.0) / 2.0 + radius * angle.cos() + r.random_range(-0.5..0.5);
        let width = r.random_range(0.8..1.6);
        let mut img = vec![0.0; shape.len()];
        for row in 0..shape.h {
            for col in 0..shape.w {
                let d2 = (row as f64 - cy).powi(2) + (col as f64 - cx).powi(2);
                let blob = (-d2 / (2.0 * width * width)).exp();
                for ch in 0..shape.c {
                    let noise = 0.25 * r.random::<f64>();
                    img[shape.index(row, col, ch)] = f64::from((blob + noise).min(1.0) as f32);
                }
            }
        }
        samples.push(img);
        labels.push(label);
    }
    Ok(Dataset { shape, samples, labels })
}

/// Two Gaussian clusters in `[0, 1]^dim`, one per class.
pub fn blob_dataset(n: usize, dim: usize, seed: u64) -> Result<Dataset> {
    if dim == 0 {
        return Err(Error::shape("blob data needs at least one feature"));
    }
    let mut r = rng(seed, 5);
    let centres: Vec<Vec<f64>> = (0..2)
        .map(|_| (0..dim).map(|_| r.random_range(0.2..0.8)).collect())
        .collect();
    let noise = Normal::new(0.0, 0.1).expect("constant std");
    let mut samples = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = i % 2;
        let x = centres[label]
            .iter()
            .map(|c| f64::from((c + noise.sample(&mut r)).clamp(0.0, 1.0) as f32))
            .collect();
        samples.push(x);
        labels.push(label);
    }
    Ok(Dataset {
        shape: Shape3::flat(dim),
        samples,
        labels,
    })
}

/// Classifier for labelled data: a random hidden layer and a readout whose
/// row `c` is the mean hidden activation of class `c`, normalised and
/// scaled so the largest training output is `out_rate` Hz under
/// `range_scale`.
pub fn class_mean_classifier(
    data: &Dataset,
    hidden: usize,
    range_scale: f64,
    out_rate: f64,
    seed: u64,
) -> Result<AnnNetwork> {
    let n_classes = data.n_classes();
    if data.is_empty() || n_classes == 0 || hidden == 0 {
        return Err(Error::shape("classifier needs data, classes and hidden units"));
    }
    let dim = data.shape.len();
    let spec = MlpFixture {
        dims: vec![dim, hidden],
        weights: vec![MlpFixture::default().weights[0]],
        dead_hidden: 0,
    };
    let first = random_mlp(&spec, seed)?;
    let cfg = crate::network::SimConfig { range_scale, ..Default::default() };
    let acts = crate::network::ann_forward_batch(&first, &data.samples, &cfg)?;
    let mut means = vec![vec![0.0; hidden]; n_classes];
    for (r, &label) in acts.iter().zip(&data.labels) {
        for (m, h) in means[label].iter_mut().zip(&r.layer_outputs[0]) {
            *m += h;
        }
    }
    let mut readout = Vec::with_capacity(n_classes * hidden);
    // the class sum has the mean's direction
    for m in &means {
        let norm = m.iter().map(|v| v * v).sum::<f64>().sqrt();
        readout.extend(m.iter().map(|v| if norm > 0.0 { v / norm } else { 0.0 }));
    }
    let peak = acts
        .iter()
        .flat_map(|r| readout.chunks(hidden).map(|row| row.iter().zip(&r.layer_outputs[0]).map(|(w, h)| w * h).sum::<f64>()))
        .fold(0.0, f64::max);
    if peak <= 0.0 {
        return Err(Error::domain("hidden layer is silent on every sample"));
    }
    let readout = readout.into_iter().map(|w| f64::from((w * out_rate / peak) as f32)).collect();
    let Layer::Dense { layer: l1, .. } = first.layers()[0].clone() else {
        unreachable!("random_mlp builds dense layers")
    };
    Network::new(
        data.shape,
        vec![
            Layer::Dense { name: "fc1".into(), layer: l1 },
            Layer::Dense {
                name: "fc2".into(),
                layer: DenseLayer::uniform(hidden, n_classes, readout, ReluParams::default())?,
            },
        ],
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DatasetMeta {
    format_version: u32,
    shape: Shape3,
    n_samples: usize,
    dtype: String,
}

const LABELS_HEADER: &str = "file,label";

fn sample_name(i: usize) -> String {
    format!("sample_{i:05}.bin")
}

/// Writes `dataset.json`, one flat `f32le` file per sample, and
/// `labels.csv` (`file,label`).
pub fn save_dataset(dir: impl AsRef<Path>, data: &Dataset) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let meta = DatasetMeta {
        format_version: 1,
        shape: data.shape,
        n_samples: data.len(),
        dtype: crate::weights::DTYPE.into(),
    };
    let meta_path = dir.join("dataset.json");
    fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n").map_err(|e| Error::io(&meta_path, e))?;
    let mut labels = format!("{LABELS_HEADER}\n");
    for (i, (x, label)) in data.samples.iter().zip(&data.labels).enumerate() {
        let bytes: Vec<u8> = x.iter().flat_map(|&v| (v as f32).to_le_bytes()).collect();
        let path = dir.join(sample_name(i));
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        labels.push_str(&format!("{},{label}\n", sample_name(i)));
    }
    let labels_path = dir.join("labels.csv");
    fs::write(&labels_path, labels).map_err(|e| Error::io(&labels_path, e))
}

pub fn load_dataset(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();
    let bad = |detail: String| Error::Format { what: "dataset", detail };
    let meta_path = dir.join("dataset.json");
    let meta: DatasetMeta =
        serde_json::from_str(&fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?)?;
    if meta.format_version != 1 || meta.dtype != crate::weights::DTYPE {
        return Err(bad(format!(
            "unsupported format_version {} / dtype `{}`",
            meta.format_version, meta.dtype
        )));
    }
    let labels_path = dir.join("labels.csv");
    let text = fs::read_to_string(&labels_path).map_err(|e| Error::io(&labels_path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(LABELS_HEADER) {
        return Err(bad(format!("labels.csv must start with `{LABELS_HEADER}`")));
    }
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let (file, label) = line
            .split_once(',')
            .ok_or_else(|| bad(format!("labels.csv line {}: expected `file,label`", lineno + 2)))?;
        let label: usize = label
            .trim()
            .parse()
            .map_err(|_| bad(format!("labels.csv line {}: bad label `{label}`", lineno + 2)))?;
        let path = dir.join(file.trim());
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        if bytes.len() != meta.shape.len() * 4 {
            return Err(Error::shape(format!(
                "{} holds {} bytes, shape {} needs {}",
                path.display(),
                bytes.len(),
                meta.shape,
                meta.shape.len() * 4
            )));
        }
        samples.push(
            bytes
                .chunks_exact(4)
                .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])))
                .collect(),
        );
        labels.push(label);
    }
    if samples.len() != meta.n_samples {
        return Err(bad(format!(
            "dataset.json declares {} samples, labels.csv lists {}",
            meta.n_samples,
            samples.len()
        )));
    }
    Ok(Dataset {
        shape: meta.shape,
        samples,
        labels,
    })
}
