use linlif::coding::{decode, encode, encode_rate, weighted_charge_sequence, CodingConfig, SpikeTrain, TimeGrid};
use linlif::eval::{confusion_matrix, correlation, correlation_matrices};
use linlif::layers::{
    conv_forward, conv_output_len, dense_forward, maxpool_forward, ann_maxpool, ConvLayer, DenseLayer, KernelShape,
    PoolLayerSpec, RateVolume, Shape3, SpikeVolume,
};
use linlif::mapping::{bias_from_params, params_from_relu, slope_from_params, ReluParams};
use linlif::neuron::{closed_form_mp, decay_factor, run, NeuronParams, ResetMode};
use linlif::sweep::{analytic_rate, stepped_rate, EqualFrequencyCase};
use proptest::prelude::*;

const DT: f64 = 0.01;

fn grid(t: f64) -> TimeGrid {
    TimeGrid::from_window(DT, t).unwrap()
}

fn mode() -> impl Strategy<Value = ResetMode> {
    prop_oneof![Just(ResetMode::LinearReset), Just(ResetMode::ResetToZero)]
}

fn neuron() -> impl Strategy<Value = NeuronParams> {
    (0.25..4.0f64, prop_oneof![Just(0.0), 0.01..10.0f64], 0.5..2.0f64, mode())
        .prop_map(|(c_m, g_l, v_th, reset_mode)| NeuronParams { c_m, g_l, v_th, reset_mode })
}

/// Arbitrary train on a 300-step grid.
fn train() -> impl Strategy<Value = SpikeTrain> {
    proptest::collection::btree_set(0..300usize, 0..60)
        .prop_map(|s| SpikeTrain::from_sorted(grid(3.0), s.into_iter().collect()).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

proptest! {
    #[test]
    fn exact_decay_consistency(p in neuron(), v0 in 0.01..0.99f64, k in 1usize..400) {
        // start below threshold with no input; the neuron only decays
        let mut charges = vec![0.0; k];
        charges[0] = v0 * p.v_th * p.c_m;
        let (_, trace) = run(&p, &charges, TimeGrid::new(DT, k).unwrap()).unwrap();
        let v_start = trace.potentials[0];
        let expected = v_start * (-((k - 1) as f64) * DT * p.g_l / p.c_m).exp();
        prop_assert!(rel(trace.potentials[k - 1], expected) <= 1e-12);
        prop_assert!(rel(decay_factor(&p, DT), (-DT * p.g_l / p.c_m).exp()) <= 1e-15);
    }

    #[test]
    fn closed_form_agreement(p in neuron(), period in 1usize..40, n in 1u32..15, frac in 0.01..0.5f64) {
        let weight = frac * p.v_th * p.c_m / f64::from(n);
        let f_in = 1.0 / (period as f64 * DT);
        let g = TimeGrid::new(DT, period * n as usize).unwrap();
        let train = encode_rate(f_in, g).unwrap();
        let charges = weighted_charge_sequence(std::slice::from_ref(&train), &[weight]).unwrap();
        let (out, trace) = run(&p, &charges, g).unwrap();
        prop_assert!(out.is_empty());
        for (j, &idx) in train.events().iter().enumerate() {
            let cf = closed_form_mp(&p, weight, f_in, j as u32 + 1).unwrap();
            prop_assert!(rel(trace.potentials[idx], cf) <= 1e-9, "spike {j}: {} vs {cf}", trace.potentials[idx]);
        }
    }

    #[test]
    fn soft_reset_rate_conservation(c_m in 0.25..4.0f64, v_th in 0.5..2.0f64, frac in 0.001..1.0f64,
                                    t in prop::sample::select(vec![1.0, 3.0, 10.0]), j in 1u32..300) {
        let p = NeuronParams { c_m, g_l: 0.0, v_th, reset_mode: ResetMode::LinearReset };
        let f_in = (f64::from(j) / t).min(100.0);
        let weight = frac * v_th * c_m;
        let decoded = linlif::sweep::output_rate(&p, &[weight], f_in, grid(t)).unwrap();
        prop_assert!((decoded - weight * f_in / (v_th * c_m)).abs() < 1.0 / t);
    }

    #[test]
    fn reset_ordering(p in neuron(), trains in proptest::collection::vec(train(), 1..4),
                      weights in proptest::collection::vec(0.0..1.5f64, 4)) {
        let charges = weighted_charge_sequence(&trains, &weights[..trains.len()]).unwrap();
        let g = grid(3.0);
        let (soft, _) = run(&p.with_reset(ResetMode::LinearReset), &charges, g).unwrap();
        let (hard, _) = run(&p.with_reset(ResetMode::ResetToZero), &charges, g).unwrap();
        prop_assert!(soft.count() >= hard.count());
    }

    #[test]
    fn determinism(p in neuron(), t in train(), w in 0.0..2.0f64) {
        let charges = weighted_charge_sequence(&[t], &[w]).unwrap();
        let a = run(&p, &charges, grid(3.0)).unwrap();
        let b = run(&p, &charges, grid(3.0)).unwrap();
        prop_assert_eq!(a.0, b.0);
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a.1.potentials), bits(&b.1.potentials));
    }

    #[test]
    fn decode_never_overcounts(x in 0.0..1.0f64, k in 0.1..100.0f64, t in 0.5..12.0f64) {
        let cfg = CodingConfig::new(DT, t, k).unwrap();
        let g = cfg.grid().unwrap();
        let tw = g.t_window();
        let d = decode(&encode(x, &cfg).unwrap());
        let f = k * x;
        prop_assert!(d <= f + 1e-9 && d > f - 1.0 / tw - 1e-9, "{d} vs {f}");
        prop_assert!(encode(x, &cfg).unwrap().count() <= g.n_steps);
    }

    #[test]
    fn encoding_is_monotone(a in 0.0..1.0f64, b in 0.0..1.0f64, k in 0.1..100.0f64) {
        let cfg = CodingConfig::new(DT, 3.0, k).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(encode(lo, &cfg).unwrap().count() <= encode(hi, &cfg).unwrap().count());
    }

    #[test]
    fn over_rate_rejected(f in 100.001..1000.0f64) {
        prop_assert!(encode_rate(f, grid(3.0)).unwrap_err().is_domain());
    }

    #[test]
    fn charge_is_linear_in_weights(trains in proptest::collection::vec(train(), 1..4),
                                   w1 in proptest::collection::vec(-2.0..2.0f64, 4),
                                   w2 in proptest::collection::vec(-2.0..2.0f64, 4),
                                   a in -3.0..3.0f64) {
        let n = trains.len();
        let combo: Vec<f64> = (0..n).map(|i| a * w1[i] + w2[i]).collect();
        let lhs = weighted_charge_sequence(&trains, &combo).unwrap();
        let q1 = weighted_charge_sequence(&trains, &w1[..n]).unwrap();
        let q2 = weighted_charge_sequence(&trains, &w2[..n]).unwrap();
        for i in 0..lhs.len() {
            prop_assert!((lhs[i] - (a * q1[i] + q2[i])).abs() <= 1e-12 * (1.0 + lhs[i].abs()));
        }
    }

    #[test]
    fn mapping_round_trip(b in -50.0..0.0f64, k in 0.05..20.0f64, v_th in 0.1..10.0f64, x in 0.001..0.999f64) {
        let relu = ReluParams::new(b, k).unwrap();
        // c_m = 1 / (k v_th), so x of v_th * c_m is x / k
        let sum_w = x / k;
        let n = params_from_relu(&relu, sum_w, v_th).unwrap();
        let b2 = bias_from_params(sum_w, &n).unwrap();
        prop_assert!(rel(b2, b) <= 1e-9, "{b2} vs {b}");
        prop_assert!(rel(slope_from_params(&n), k) <= 1e-9);
    }

    #[test]
    fn bias_decreases_with_leak(g1 in 0.01..10.0f64, dg in 0.01..5.0f64, sum_w in 0.05..0.95f64) {
        let n1 = NeuronParams { g_l: g1, ..NeuronParams::reference() };
        let n2 = NeuronParams { g_l: g1 + dg, ..n1 };
        prop_assert!(bias_from_params(sum_w, &n2).unwrap() < bias_from_params(sum_w, &n1).unwrap());
    }

    #[test]
    fn correlation_symmetry_and_affine_invariance(
        xs in proptest::collection::vec(-100.0..100.0f64, 3..30),
        seed in 0.0..1.0f64, a in prop_oneof![-10.0..-0.1f64, 0.1..10.0f64], c in -50.0..50.0f64)
    {
        let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| x * seed + (i as f64 * 1.7).sin()).collect();
        prop_assume!(xs.iter().any(|&v| v != xs[0]) && ys.iter().any(|&v| v != ys[0]));
        let r = correlation(&xs, &ys).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r));
        prop_assert_eq!(r, correlation(&ys, &xs).unwrap());
        let t: Vec<f64> = xs.iter().map(|x| a * x + c).collect();
        prop_assert!((correlation(&t, &ys).unwrap() - a.signum() * r).abs() < 1e-9);
        prop_assert_eq!(correlation(&xs, &xs).unwrap(), 1.0);
    }

    #[test]
    fn correlation_matrices_symmetric_unit_diagonal(
        rows in proptest::collection::vec(proptest::collection::vec(0.0..50.0f64, 5), 2..8),
        noise in proptest::collection::vec(-1.0..1.0f64, 40))
    {
        let other: Vec<Vec<f64>> = rows.iter().enumerate()
            .map(|(d, r)| r.iter().enumerate().map(|(j, v)| v + noise[(d * 5 + j) % 40]).collect())
            .collect();
        let m = correlation_matrices(&rows, &other).unwrap();
        for mat in [&m.data, &m.neuron] {
            for i in 0..mat.rows {
                prop_assert_eq!(mat.get(i, i), 1.0);
                for j in 0..mat.cols {
                    prop_assert_eq!(mat.get(i, j), mat.get(j, i));
                }
            }
        }
        prop_assert_eq!(m.kept_neurons.len() + m.excluded_neurons.len(), 5);
    }

    #[test]
    fn confusion_trace_matches_agreement(pairs in proptest::collection::vec((0usize..4, 0usize..4), 1..50)) {
        let (r, p): (Vec<usize>, Vec<usize>) = pairs.iter().copied().unzip();
        let c = confusion_matrix(&r, &p, 4).unwrap();
        let agree = pairs.iter().filter(|(a, b)| a == b).count() as f64 / pairs.len() as f64;
        prop_assert_eq!(c.agreement(), agree);
        for (i, row) in c.counts.iter().enumerate() {
            prop_assert_eq!(row.iter().sum::<usize>(), r.iter().filter(|&&x| x == i).count());
        }
    }

    #[test]
    fn quantization_bound_is_a_theorem(p in neuron(), frac in 0.05..1.0f64,
                                       f in prop::sample::select(vec![1.0, 2.0, 4.0, 5.0, 10.0, 20.0, 25.0, 50.0]),
                                       t in prop::sample::select(vec![1.0, 3.0, 10.0])) {
        let case = EqualFrequencyCase { params: p, weight: frac * p.v_th * p.c_m, f_in: f };
        let g = grid(t);
        if let Some(expected) = analytic_rate(&case, g) {
            prop_assert!((expected - stepped_rate(&case, g).unwrap()).abs() < 1.0 / t);
        }
    }
}

fn lif(mode: ResetMode) -> NeuronParams {
    NeuronParams { c_m: 1.0, g_l: 0.0, v_th: 1.0, reset_mode: mode }
}

fn volume(shape: Shape3, rates: &[f64], t: f64) -> SpikeVolume {
    let trains = rates.iter().map(|&f| encode_rate(f, grid(t)).unwrap()).collect();
    SpikeVolume::new(shape, trains).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conv_spanning_input_equals_dense(h in 1usize..5, w in 1usize..5, c in 1usize..3, nf in 1usize..4,
                                        rates in proptest::collection::vec(0.0..60.0f64, 48),
                                        ws in proptest::collection::vec(-0.8..0.8f64, 144)) {
        let shape = Shape3::new(h, w, c);
        let input = volume(shape, &rates[..shape.len()], 3.0);
        let kernel = KernelShape { n_h: h, n_w: w, n_c: c, n_filters: nf };
        let conv = ConvLayer::new(kernel, ws[..kernel.len()].to_vec(), 1, 0, vec![lif(ResetMode::LinearReset); nf]).unwrap();
        let rows: Vec<f64> = (0..nf).flat_map(|f| conv.filter_weights(f)).collect();
        let dense = DenseLayer::uniform(shape.len(), nf, rows, lif(ResetMode::LinearReset)).unwrap();
        let a = conv_forward(&input, &conv).unwrap();
        let b = dense_forward(input.trains(), &dense).unwrap();
        prop_assert_eq!(a.trains(), &b[..]);
    }

    #[test]
    fn output_len_matches_enumeration(n in 1usize..30, k in 1usize..8, s in 1usize..5, p in 0usize..4) {
        let brute = (0..).take_while(|i| i * s + k <= n + 2 * p).count();
        match conv_output_len(n, k, s, p) {
            Ok(len) => prop_assert_eq!(len, brute),
            Err(_) => prop_assert_eq!(brute, 0),
        }
    }

    #[test]
    fn pooling_commutes_with_decoding(h in 2usize..7, w in 2usize..7, c in 1usize..3, win in 1usize..3, s in 1usize..3,
                                      rates in proptest::collection::vec(0.0..100.0f64, 98)) {
        let shape = Shape3::new(h, w, c);
        let spec = PoolLayerSpec::new((win, win), s).unwrap();
        let input = volume(shape, &rates[..shape.len()], 3.0);
        let decoded = RateVolume::new(shape, input.rates()).unwrap();
        let pooled = maxpool_forward(&input, &spec).unwrap();
        let numeric = ann_maxpool(&decoded, &spec).unwrap();
        prop_assert_eq!(pooled.rates(), numeric.values);
    }

    #[test]
    fn dense_rate_approximation(ws in proptest::collection::vec(0.01..0.3f64, 3),
                                f in prop::sample::select(vec![2.0, 5.0, 10.0, 20.0, 25.0])) {
        // equal input rates into one pure integrator: error below 1 / T and shrinking
        let sum_w: f64 = ws.iter().sum();
        let dense = DenseLayer::uniform(3, 1, ws.clone(), lif(ResetMode::LinearReset)).unwrap();
        let relu = sum_w * f;
        let mut last = f64::INFINITY;
        for t in [1.0, 3.0, 10.0] {
            let inputs = volume(Shape3::flat(3), &[f; 3], t);
            let out = dense_forward(inputs.trains(), &dense).unwrap();
            let err = (decode(&out[0]) - relu).abs();
            prop_assert!(err < 1.0 / t);
            prop_assert!(err <= last + 1.0 / t);
            last = err;
        }
    }
}
