//! Layer kernels in two flavours: spiking (linear LIF units on spike
//! trains) and rate-domain ReLU.
//!
//! Layers are generic over their unit parameters, so one `DenseLayer` type
//! carries either [`NeuronParams`] or [`ReluParams`] per output unit while the
//! weights are shared verbatim between the two.
//!
//! Volumes are `(height, width, channels)` in row-major order; flattening
//! uses the same order. Conv kernels are `(n_h, n_w, n_c, n_filters)`
//! row-major, dense weights are `out_dim x in_dim` row-major.

use serde::{Deserialize, Serialize};

use crate::coding::{accumulate_charge, check_same_grid, SpikeTrain, TimeGrid};
use crate::error::{Error, Result};
use crate::mapping::ReluParams;
use crate::neuron::{fire_steps, NeuronParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shape3 {
    pub h: usize,
    pub w: usize,
    pub c: usize,
}

impl Shape3 {
    pub const fn new(h: usize, w: usize, c: usize) -> Self {
        Shape3 { h, w, c }
    }

    pub const fn flat(n: usize) -> Self {
        Shape3 { h: 1, w: 1, c: n }
    }

    pub const fn len(&self) -> usize {
        self.h * self.w * self.c
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub const fn index(&self, row: usize, col: usize, ch: usize) -> usize {
        (row * self.w + col) * self.c + ch
    }
}

impl std::fmt::Display for Shape3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.h, self.w, self.c)
    }
}

/// A `(h, w, c)` grid of spike trains sharing one time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeVolume {
    shape: Shape3,
    grid: TimeGrid,
    trains: Vec<SpikeTrain>,
}

impl SpikeVolume {
    pub fn new(shape: Shape3, trains: Vec<SpikeTrain>) -> Result<Self> {
        if trains.len() != shape.len() {
            return Err(Error::shape(format!(
                "volume {shape} needs {} trains, got {}",
                shape.len(),
                trains.len()
            )));
        }
        let grid = check_same_grid(trains.iter())?
            .ok_or_else(|| Error::shape("empty spike volume"))?;
        Ok(SpikeVolume {
            shape,
            grid,
            trains,
        })
    }

    pub fn shape(&self) -> Shape3 {
        self.shape
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn trains(&self) -> &[SpikeTrain] {
        &self.trains
    }

    pub fn into_trains(self) -> Vec<SpikeTrain> {
        self.trains
    }

    pub fn at(&self, row: usize, col: usize, ch: usize) -> &SpikeTrain {
        &self.trains[self.shape.index(row, col, ch)]
    }

    pub fn counts(&self) -> Vec<usize> {
        self.trains.iter().map(SpikeTrain::count).collect()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.trains.iter().map(crate::coding::decode).collect()
    }

    pub fn flatten(self) -> Self {
        SpikeVolume {
            shape: Shape3::flat(self.shape.len()),
            ..self
        }
    }
}

/// A `(h, w, c)` grid of rates or activations.
#[derive(Debug, Clone, PartialEq)]
pub struct RateVolume {
    pub shape: Shape3,
    pub values: Vec<f64>,
}

impl RateVolume {
    pub fn new(shape: Shape3, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::shape(format!(
                "volume {shape} needs {} values, got {}",
                shape.len(),
                values.len()
            )));
        }
        Ok(RateVolume { shape, values })
    }

    pub fn at(&self, row: usize, col: usize, ch: usize) -> f64 {
        self.values[self.shape.index(row, col, ch)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<U> {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    /// One entry per output unit.
    pub units: Vec<U>,
}

pub type DenseLayerSpec = DenseLayer<NeuronParams>;

impl<U: Clone> DenseLayer<U> {
    pub fn new(in_dim: usize, out_dim: usize, weights: Vec<f64>, units: Vec<U>) -> Result<Self> {
        if weights.len() != in_dim * out_dim {
            return Err(Error::shape(format!(
                "dense {out_dim}x{in_dim} needs {} weights, got {}",
                in_dim * out_dim,
                weights.len()
            )));
        }
        if units.len() != out_dim {
            return Err(Error::shape(format!(
                "dense layer has {out_dim} outputs but {} unit parameter sets",
                units.len()
            )));
        }
        Ok(DenseLayer {
            in_dim,
            out_dim,
            weights,
            units,
        })
    }

    pub fn uniform(in_dim: usize, out_dim: usize, weights: Vec<f64>, unit: U) -> Result<Self> {
        Self::new(in_dim, out_dim, weights, vec![unit; out_dim])
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.weights[j * self.in_dim..(j + 1) * self.in_dim]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelShape {
    pub n_h: usize,
    pub n_w: usize,
    pub n_c: usize,
    pub n_filters: usize,
}

impl KernelShape {
    pub const fn len(&self) -> usize {
        self.n_h * self.n_w * self.n_c * self.n_filters
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub const fn index(&self, i: usize, j: usize, k: usize, f: usize) -> usize {
        ((i * self.n_w + j) * self.n_c + k) * self.n_filters + f
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer<U> {
    pub kernel: KernelShape,
    pub weights: Vec<f64>,
    pub stride: usize,
    pub padding: usize,
    /// One entry per filter.
    pub units: Vec<U>,
}

pub type ConvLayerSpec = ConvLayer<NeuronParams>;

/// Output extent along one axis, `floor((n + 2p - k) / s) + 1`.
pub fn conv_output_len(n: usize, kernel: usize, stride: usize, padding: usize) -> Result<usize> {
    if stride == 0 {
        return Err(Error::shape("stride must be >= 1"));
    }
    let padded = n + 2 * padding;
    if kernel == 0 || kernel > padded {
        return Err(Error::shape(format!(
            "kernel extent {kernel} does not fit padded input extent {padded}"
        )));
    }
    Ok((padded - kernel) / stride + 1)
}

impl<U: Clone> ConvLayer<U> {
    pub fn new(
        kernel: KernelShape,
        weights: Vec<f64>,
        stride: usize,
        padding: usize,
        units: Vec<U>,
    ) -> Result<Self> {
        if weights.len() != kernel.len() {
            return Err(Error::shape(format!(
                "kernel {}x{}x{}x{} needs {} weights, got {}",
                kernel.n_h,
                kernel.n_w,
                kernel.n_c,
                kernel.n_filters,
                kernel.len(),
                weights.len()
            )));
        }
        if stride == 0 {
            return Err(Error::shape("stride must be >= 1"));
        }
        if units.len() != kernel.n_filters {
            return Err(Error::shape(format!(
                "{} filters but {} unit parameter sets",
                kernel.n_filters,
                units.len()
            )));
        }
        Ok(ConvLayer {
            kernel,
            weights,
            stride,
            padding,
            units,
        })
    }

    pub fn output_shape(&self, input: Shape3) -> Result<Shape3> {
        if input.c != self.kernel.n_c {
            return Err(Error::shape(format!(
                "kernel expects {} channels, input has {}",
                self.kernel.n_c, input.c
            )));
        }
        Ok(Shape3 {
            h: conv_output_len(input.h, self.kernel.n_h, self.stride, self.padding)?,
            w: conv_output_len(input.w, self.kernel.n_w, self.stride, self.padding)?,
            c: self.kernel.n_filters,
        })
    }

    /// Filter `f`'s weights in `(i, j, k)` order, the input-flattening order.
    pub fn filter_weights(&self, f: usize) -> Vec<f64> {
        self.weights
            .iter()
            .skip(f)
            .step_by(self.kernel.n_filters)
            .copied()
            .collect()
    }

    /// Receptive field of output `(row, col)`: `(input index, kernel offset)`
    /// pairs in ascending `(i, j, k)` order, padding positions omitted.
    fn receptive_field(&self, input: Shape3, row: usize, col: usize) -> Vec<(usize, usize)> {
        let k = self.kernel;
        let mut out = Vec::with_capacity(k.n_h * k.n_w * k.n_c);
        for i in 0..k.n_h {
            let Some(r) = (row * self.stride + i).checked_sub(self.padding) else {
                continue;
            };
            if r >= input.h {
                continue;
            }
            for j in 0..k.n_w {
                let Some(c) = (col * self.stride + j).checked_sub(self.padding) else {
                    continue;
                };
                if c >= input.w {
                    continue;
                }
                for ch in 0..k.n_c {
                    out.push((input.index(r, c, ch), k.index(i, j, ch, 0)));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolLayerSpec {
    pub window: (usize, usize),
    pub stride: usize,
}

impl PoolLayerSpec {
    pub fn new(window: (usize, usize), stride: usize) -> Result<Self> {
        if window.0 == 0 || window.1 == 0 {
            return Err(Error::shape("pooling window dims must be >= 1"));
        }
        if stride == 0 {
            return Err(Error::shape("stride must be >= 1"));
        }
        Ok(PoolLayerSpec { window, stride })
    }

    pub fn output_shape(&self, input: Shape3) -> Result<Shape3> {
        Ok(Shape3 {
            h: conv_output_len(input.h, self.window.0, self.stride, 0)?,
            w: conv_output_len(input.w, self.window.1, self.stride, 0)?,
            c: input.c,
        })
    }

    /// Input indices of the window feeding output `(row, col, ch)`, row-major.
    fn members(&self, input: Shape3, row: usize, col: usize, ch: usize) -> impl Iterator<Item = usize> {
        let (wh, ww, s) = (self.window.0, self.window.1, self.stride);
        (0..wh).flat_map(move |i| (0..ww).map(move |j| input.index(row * s + i, col * s + j, ch)))
    }
}

#[cfg(feature = "parallel")]
fn map_units<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_units<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).map(f).collect()
}

fn lif_output<'a>(
    grid: TimeGrid,
    neuron: &NeuronParams,
    inputs: impl Iterator<Item = (&'a SpikeTrain, f64)>,
) -> SpikeTrain {
    let mut charge = vec![0.0; grid.n_steps];
    accumulate_charge(&mut charge, inputs);
    let fired = fire_steps(neuron, &charge, grid.dt);
    SpikeTrain::from_sorted(grid, fired).expect("neuron fires on increasing in-range steps")
}

/// Spiking fully connected layer: each output is a LIF neuron driven by the
/// weighted sum of all input trains.
pub fn dense_forward(inputs: &[SpikeTrain], spec: &DenseLayerSpec) -> Result<Vec<SpikeTrain>> {
    if inputs.len() != spec.in_dim {
        return Err(Error::shape(format!(
            "dense layer expects {} inputs, got {}",
            spec.in_dim,
            inputs.len()
        )));
    }
    let grid = check_same_grid(inputs.iter())?.ok_or_else(|| Error::shape("no inputs"))?;
    Ok(map_units(spec.out_dim, |j| {
        let row = spec.row(j);
        lif_output(grid, &spec.units[j], inputs.iter().zip(row.iter().copied()))
    }))
}

/// Spiking convolution. Padding positions contribute silent trains.
pub fn conv_forward(input: &SpikeVolume, spec: &ConvLayerSpec) -> Result<SpikeVolume> {
    let in_shape = input.shape();
    let out_shape = spec.output_shape(in_shape)?;
    let grid = input.grid();
    let fields: Vec<Vec<(usize, usize)>> = (0..out_shape.h * out_shape.w)
        .map(|p| spec.receptive_field(in_shape, p / out_shape.w, p % out_shape.w))
        .collect();
    let trains = map_units(out_shape.len(), |o| {
        let (pos, f) = (o / out_shape.c, o % out_shape.c);
        let inputs = fields[pos]
            .iter()
            .map(|&(src, w0)| (&input.trains[src], spec.weights[w0 + f]));
        lif_output(grid, &spec.units[f], inputs)
    });
    SpikeVolume::new(out_shape, trains)
}

/// For every pooling output, the input index whose train has the most
/// spikes; ties go to the first member in row-major window order.
pub fn maxpool_winners(input: &SpikeVolume, spec: &PoolLayerSpec) -> Result<(Shape3, Vec<usize>)> {
    let in_shape = input.shape();
    let out_shape = spec.output_shape(in_shape)?;
    let mut winners = Vec::with_capacity(out_shape.len());
    for row in 0..out_shape.h {
        for col in 0..out_shape.w {
            for ch in 0..out_shape.c {
                let mut best: Option<(usize, usize)> = None;
                for idx in spec.members(in_shape, row, col, ch) {
                    let n = input.trains[idx].count();
                    if best.is_none_or(|(_, m)| n > m) {
                        best = Some((idx, n));
                    }
                }
                winners.push(best.expect("window has at least one member").0);
            }
        }
    }
    Ok((out_shape, winners))
}

/// Spiking max-pool: forwards the whole train of the window member with the
/// largest spike count over the window.
pub fn maxpool_forward(input: &SpikeVolume, spec: &PoolLayerSpec) -> Result<SpikeVolume> {
    let (out_shape, winners) = maxpool_winners(input, spec)?;
    let trains = winners.into_iter().map(|i| input.trains[i].clone()).collect();
    SpikeVolume::new(out_shape, trains)
}

/// Rate-domain fully connected ReLU layer.
pub fn ann_dense(inputs: &[f64], layer: &DenseLayer<ReluParams>) -> Result<Vec<f64>> {
    if inputs.len() != layer.in_dim {
        return Err(Error::shape(format!(
            "dense layer expects {} inputs, got {}",
            layer.in_dim,
            inputs.len()
        )));
    }
    Ok((0..layer.out_dim)
        .map(|j| {
            let drive: f64 = layer.row(j).iter().zip(inputs).map(|(w, x)| w * x).sum();
            layer.units[j].activate(drive)
        })
        .collect())
}

/// Rate-domain convolution followed by ReLU; zero padding.
pub fn ann_conv(input: &RateVolume, layer: &ConvLayer<ReluParams>) -> Result<RateVolume> {
    let out_shape = layer.output_shape(input.shape)?;
    let mut values = Vec::with_capacity(out_shape.len());
    for row in 0..out_shape.h {
        for col in 0..out_shape.w {
            let field = layer.receptive_field(input.shape, row, col);
            for f in 0..out_shape.c {
                let drive: f64 = field
                    .iter()
                    .map(|&(src, w0)| input.values[src] * layer.weights[w0 + f])
                    .sum();
                values.push(layer.units[f].activate(drive));
            }
        }
    }
    RateVolume::new(out_shape, values)
}

/// Rate-domain max-pool.
/// Flat index of each window's maximum, or `None` where the maximum is
/// shared by several members.
pub fn maxpool_argmax(input: &RateVolume, spec: &PoolLayerSpec) -> Result<(Shape3, Vec<Option<usize>>)> {
    let out_shape = spec.output_shape(input.shape)?;
    let mut winners = Vec::with_capacity(out_shape.len());
    for row in 0..out_shape.h {
        for col in 0..out_shape.w {
            for ch in 0..out_shape.c {
                let members: Vec<usize> = spec.members(input.shape, row, col, ch).collect();
                let m = members.iter().map(|&i| input.values[i]).fold(f64::NEG_INFINITY, f64::max);
                let mut at_max = members.into_iter().filter(|&i| input.values[i] == m);
                let first = at_max.next();
                winners.push(if at_max.next().is_none() { first } else { None });
            }
        }
    }
    Ok((out_shape, winners))
}

pub fn ann_maxpool(input: &RateVolume, spec: &PoolLayerSpec) -> Result<RateVolume> {
    let out_shape = spec.output_shape(input.shape)?;
    let mut values = Vec::with_capacity(out_shape.len());
    for row in 0..out_shape.h {
        for col in 0..out_shape.w {
            for ch in 0..out_shape.c {
                let m = spec
                    .members(input.shape, row, col, ch)
                    .map(|i| input.values[i])
                    .fold(f64::NEG_INFINITY, f64::max);
                values.push(m);
            }
        }
    }
    RateVolume::new(out_shape, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{decode, encode_rate};
    use crate::neuron::ResetMode;

    fn grid() -> TimeGrid {
        TimeGrid::from_window(0.01, 3.0).unwrap()
    }

    fn integrator() -> NeuronParams {
        NeuronParams::new(1.0, 0.0, 1.0, ResetMode::LinearReset).unwrap()
    }

    fn train_with_count(n: usize) -> SpikeTrain {
        SpikeTrain::from_sorted(grid(), (0..n).map(|i| 10 * i).collect()).unwrap()
    }

    #[test]
    fn dense_silent_in_silent_out() {
        let spec = DenseLayer::uniform(3, 2, vec![0.5; 6], integrator()).unwrap();
        let inputs = vec![SpikeTrain::empty(grid()); 3];
        let out = dense_forward(&inputs, &spec).unwrap();
        assert!(out.iter().all(SpikeTrain::is_empty));
    }

    #[test]
    fn dense_soft_reset_conserves_rate() {
        let spec = DenseLayer::uniform(2, 2, vec![0.6, 0.0, 0.0, 0.6], integrator()).unwrap();
        let inputs = vec![encode_rate(10.0, grid()).unwrap(), encode_rate(5.0, grid()).unwrap()];
        let out = dense_forward(&inputs, &spec).unwrap();
        // step oracle: floor(30 * 0.6) = 18 and floor(15 * 0.6) = 9 spikes
        assert_eq!(out[0].count(), 18);
        assert_eq!(out[1].count(), 9);
        assert!((decode(&out[0]) - 6.0).abs() <= 1.0 / 3.0);
        assert!((decode(&out[1]) - 3.0).abs() <= 1.0 / 3.0);
    }

    #[test]
    fn dense_negative_weight_never_fires() {
        let spec = DenseLayer::uniform(1, 1, vec![-0.5], NeuronParams::reference()).unwrap();
        let out = dense_forward(&[encode_rate(50.0, grid()).unwrap()], &spec).unwrap();
        assert!(out[0].is_empty());
    }

    #[test]
    fn dense_rejects_wrong_input_count() {
        let spec = DenseLayer::uniform(2, 1, vec![1.0, 1.0], integrator()).unwrap();
        assert!(dense_forward(&[SpikeTrain::empty(grid())], &spec).is_err());
        assert!(DenseLayer::uniform(2, 1, vec![1.0], integrator()).is_err());
    }

    fn random_volume(shape: Shape3, seed: u64) -> SpikeVolume {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let trains = (0..shape.len())
            .map(|_| encode_rate(f64::from(rng.random_range(0u32..=20)), grid()).unwrap())
            .collect();
        SpikeVolume::new(shape, trains).unwrap()
    }

    #[test]
    fn unit_kernel_copies_input() {
        let kernel = KernelShape { n_h: 1, n_w: 1, n_c: 1, n_filters: 1 };
        let spec = ConvLayer::new(kernel, vec![1.0], 1, 0, vec![integrator()]).unwrap();
        let input = random_volume(Shape3::new(4, 4, 1), 7);
        let out = conv_forward(&input, &spec).unwrap();
        assert_eq!(out, input);
    }

    #[test]
    fn zero_kernel_is_silent() {
        let kernel = KernelShape { n_h: 3, n_w: 3, n_c: 2, n_filters: 2 };
        let spec = ConvLayer::new(kernel, vec![0.0; kernel.len()], 1, 1, vec![integrator(); 2]).unwrap();
        let out = conv_forward(&random_volume(Shape3::new(5, 5, 2), 3), &spec).unwrap();
        assert_eq!(out.shape(), Shape3::new(5, 5, 2));
        assert!(out.trains().iter().all(SpikeTrain::is_empty));
    }

    #[test]
    fn conv_rejects_bad_shapes() {
        let kernel = KernelShape { n_h: 5, n_w: 5, n_c: 1, n_filters: 1 };
        let spec = ConvLayer::new(kernel, vec![0.1; 25], 1, 0, vec![integrator()]).unwrap();
        assert!(conv_forward(&random_volume(Shape3::new(4, 4, 1), 1), &spec).is_err());
        assert!(conv_forward(&random_volume(Shape3::new(6, 6, 2), 1), &spec).is_err());
        assert!(ConvLayer::new(kernel, vec![0.1; 24], 1, 0, vec![integrator()]).is_err());
    }

    #[test]
    fn pool_picks_largest_count() {
        let trains = [3, 5, 2, 1].map(train_with_count).to_vec();
        let input = SpikeVolume::new(Shape3::new(2, 2, 1), trains.clone()).unwrap();
        let spec = PoolLayerSpec::new((2, 2), 2).unwrap();
        let out = maxpool_forward(&input, &spec).unwrap();
        assert_eq!(out.trains(), &trains[1..2]);
    }

    #[test]
    fn pool_ties_go_to_first_member() {
        let mut trains: Vec<SpikeTrain> = [4, 4, 1, 0].map(train_with_count).to_vec();
        // same count, different timing, so the copy is distinguishable
        trains[1] = SpikeTrain::from_sorted(grid(), vec![1, 2, 3, 4]).unwrap();
        let input = SpikeVolume::new(Shape3::new(2, 2, 1), trains.clone()).unwrap();
        let out = maxpool_forward(&input, &PoolLayerSpec::new((2, 2), 2).unwrap()).unwrap();
        assert_eq!(out.trains()[0], trains[0]);
    }

    #[test]
    fn pool_all_silent() {
        let input = SpikeVolume::new(Shape3::new(2, 2, 1), vec![SpikeTrain::empty(grid()); 4]).unwrap();
        let out = maxpool_forward(&input, &PoolLayerSpec::new((2, 2), 2).unwrap()).unwrap();
        assert!(out.trains()[0].is_empty());
    }

    #[test]
    fn ann_examples() {
        let ident = DenseLayer::uniform(2, 2, vec![1.0, 0.0, 0.0, 1.0], ReluParams::default()).unwrap();
        assert_eq!(ann_dense(&[0.2, 0.7], &ident).unwrap(), vec![0.2, 0.7]);

        let one = DenseLayer::uniform(2, 1, vec![0.3, 0.2], ReluParams::new(-2.16, 1.0).unwrap()).unwrap();
        assert!((ann_dense(&[20.0, 20.0], &one).unwrap()[0] - 7.84).abs() < 1e-12);

        let v = RateVolume::new(Shape3::new(2, 2, 1), vec![3.0, 5.0, 2.0, 1.0]).unwrap();
        let pooled = ann_maxpool(&v, &PoolLayerSpec::new((2, 2), 2).unwrap()).unwrap();
        assert_eq!(pooled.values, vec![5.0]);
    }

    #[test]
    fn ann_conv_matches_hand_computation() {
        // 3x3 input, 2x2 kernel, stride 1, no padding
        let input = RateVolume::new(Shape3::new(3, 3, 1), (1..=9).map(f64::from).collect()).unwrap();
        let kernel = KernelShape { n_h: 2, n_w: 2, n_c: 1, n_filters: 1 };
        let layer = ConvLayer::new(kernel, vec![1.0, -1.0, 0.5, 0.0], 1, 0, vec![ReluParams::default()]).unwrap();
        let out = ann_conv(&input, &layer).unwrap();
        // (1-2+2)=1, (2-3+2.5)=1.5, (4-5+3.5)=2.5, (5-6+4)=3
        assert_eq!(out.shape, Shape3::new(2, 2, 1));
        assert_eq!(out.values, vec![1.0, 1.5, 2.5, 3.0]);
    }
}
