use linlif::fixtures::{random_convnet, random_mlp, synthetic_images, ConvFixture, MlpFixture, MLP_RANGE_SCALE};
use linlif::layers::{DenseLayer, Shape3};
use linlif::mapping::{bias_from_params, ReluParams};
use linlif::network::{
    ann_forward, ann_forward_batch, convert, run_snn, run_snn_batch, AnnNetwork, ConversionMode, Layer, Network,
    NetworkSpec, SimConfig, SnnNetwork,
};
use linlif::neuron::NeuronParams;
use linlif::weights::{load_weights, save_weights};
use linlif::Error;

fn zero_bias() -> ConversionMode {
    ConversionMode::ZeroBias { g_l: 0.0, v_th: 1.0 }
}

fn fixture() -> (AnnNetwork, SnnNetwork, Vec<Vec<f64>>) {
    let ann = random_mlp(&MlpFixture::default(), 0).unwrap();
    let snn = convert(&ann, zero_bias()).unwrap();
    let data = synthetic_images(40, Shape3::new(8, 8, 1), 10, 3).unwrap();
    (ann, snn, data.samples)
}

#[test]
fn reference_neuron_as_two_input_net() {
    let b = bias_from_params(0.5, &NeuronParams::reference()).unwrap();
    let layer = DenseLayer::uniform(2, 1, vec![0.3, 0.2], ReluParams::new(b, 1.0).unwrap()).unwrap();
    let ann = Network::new(Shape3::flat(2), vec![Layer::Dense { name: "n".into(), layer }]).unwrap();
    let cfg = SimConfig { range_scale: 20.0, ..Default::default() };
    let r = ann_forward(&ann, &[1.0, 1.0], &cfg).unwrap();
    assert!((r.layer_outputs[0][0] - 7.84).abs() < 0.005, "{}", r.layer_outputs[0][0]);
}

#[test]
fn conversion_preserves_structure_and_weights() {
    for ann in [
        random_mlp(&MlpFixture::default(), 1).unwrap(),
        random_convnet(&ConvFixture::default(), 1).unwrap(),
    ] {
        let snn = convert(&ann, zero_bias()).unwrap();
        assert_eq!(ann.layers().len(), snn.layers().len());
        assert_eq!(ann.layer_shapes(), snn.layer_shapes());
        let bits = |n: &linlif::weights::WeightsBundle| -> Vec<Vec<u32>> {
            n.tensors.iter().map(|t| t.data.iter().map(|x| x.to_bits()).collect()).collect()
        };
        assert_eq!(bits(&ann.weights_bundle()), bits(&snn.weights_bundle()));
    }
}

#[test]
fn spec_and_weights_survive_files() {
    let dir = tempfile::tempdir().unwrap();
    let ann = random_convnet(&ConvFixture::default(), 2).unwrap();
    let spec_path = dir.path().join("net.json");
    std::fs::write(&spec_path, ann.to_spec().to_json().unwrap()).unwrap();
    save_weights(dir.path().join("weights.json"), &ann.weights_bundle()).unwrap();

    let spec = NetworkSpec::from_json(&std::fs::read_to_string(&spec_path).unwrap()).unwrap();
    let bundle = load_weights(dir.path().join("weights.json")).unwrap();
    assert_eq!(AnnNetwork::bind(&spec, &bundle).unwrap(), ann);
}

#[test]
fn bias_mode_rejects_overweight_neuron() {
    let layer = DenseLayer::uniform(2, 1, vec![0.7, 0.5], ReluParams::new(-1.0, 1.0).unwrap()).unwrap();
    let ann = Network::new(Shape3::flat(2), vec![Layer::Dense { name: "n".into(), layer }]).unwrap();
    let err = convert(&ann, ConversionMode::BiasToConductance { v_th: 1.0 }).unwrap_err();
    assert!(matches!(err, Error::MappingDomain { .. }), "{err}");
}

#[test]
fn batch_equals_sequential_bit_for_bit() {
    let (ann, snn, data) = fixture();
    let cfg = SimConfig { range_scale: MLP_RANGE_SCALE, ..Default::default() };
    let batch = run_snn_batch(&snn, &data, &cfg).unwrap();
    let seq: Vec<_> = data.iter().map(|x| run_snn(&snn, x, &cfg).unwrap()).collect();
    assert_eq!(batch, seq);
    let again = run_snn_batch(&snn, &data, &cfg).unwrap();
    let bits = |rs: &[linlif::network::RunResult]| -> Vec<u64> {
        rs.iter().flat_map(|r| r.layer_outputs.iter().flatten().map(|x| x.to_bits())).collect()
    };
    assert_eq!(bits(&batch), bits(&again));
    let a1 = ann_forward_batch(&ann, &data, &cfg).unwrap();
    assert_eq!(a1, data.iter().map(|x| ann_forward(&ann, x, &cfg).unwrap()).collect::<Vec<_>>());
}

/// Median |SNN - ANN| over the hidden layer shrinks as the window grows.
#[test]
fn behavioural_error_shrinks_with_window() {
    let (ann, snn, data) = fixture();
    let mut medians = Vec::new();
    for t in [1.0, 3.0, 10.0] {
        let cfg = SimConfig { range_scale: MLP_RANGE_SCALE, t_window: t, ..Default::default() };
        let s = run_snn_batch(&snn, &data, &cfg).unwrap();
        let a = ann_forward_batch(&ann, &data, &cfg).unwrap();
        let mut errs: Vec<f64> = s
            .iter()
            .zip(&a)
            .flat_map(|(x, y)| x.layer_outputs[0].iter().zip(&y.layer_outputs[0]).map(|(p, q)| (p - q).abs()))
            .collect();
        errs.sort_by(f64::total_cmp);
        medians.push(errs[errs.len() / 2]);
    }
    assert!(medians[0] >= medians[1] && medians[1] >= medians[2], "{medians:?}");
}

/// Agreement at a longer window is never significantly worse (one-sided
/// 95% normal tolerance on the longer window's rate).
#[test]
fn label_agreement_is_stable_in_window() {
    let ann = random_mlp(&MlpFixture::default(), 0).unwrap();
    let snn = convert(&ann, zero_bias()).unwrap();
    let data = synthetic_images(100, Shape3::new(8, 8, 1), 10, 5).unwrap().samples;
    let agreement = |t: f64| {
        let cfg = SimConfig { range_scale: MLP_RANGE_SCALE, t_window: t, ..Default::default() };
        let s = run_snn_batch(&snn, &data, &cfg).unwrap();
        let a = ann_forward_batch(&ann, &data, &cfg).unwrap();
        s.iter().zip(&a).filter(|(x, y)| x.label == y.label).count() as f64 / data.len() as f64
    };
    let rates: Vec<f64> = [1.0, 3.0, 10.0].into_iter().map(agreement).collect();
    for w in rates.windows(2) {
        let tol = 1.645 * (w[1] * (1.0 - w[1]) / data.len() as f64).sqrt();
        assert!(w[1] + tol >= w[0], "{rates:?}");
    }
}

#[test]
fn two_class_blob_agreement() {
    // stand-in for a two-class image task: 16 features, 8 hidden, 2 outputs
    let data = linlif::fixtures::blob_dataset(200, 16, 0).unwrap();
    let ann = linlif::fixtures::class_mean_classifier(&data, 8, 20.0, 50.0, 0).unwrap();
    let snn = convert(&ann, zero_bias()).unwrap();
    let cfg = SimConfig { range_scale: 20.0, t_window: 10.0, ..Default::default() };
    let s = run_snn_batch(&snn, &data.samples, &cfg).unwrap();
    let a = ann_forward_batch(&ann, &data.samples, &cfg).unwrap();
    let agree = s.iter().zip(&a).filter(|(x, y)| x.label == y.label).count() as f64 / data.len() as f64;
    assert!(agree >= 0.99, "{agree}");
    // the classifier separates the classes, so both labels occur
    assert!(a.iter().any(|r| r.label == 0) && a.iter().any(|r| r.label == 1));
}
