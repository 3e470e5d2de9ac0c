use std::path::Path;

use serde::Serialize;

use linlif::eval::equivalence_report;
use linlif::fixtures::{
    blob_dataset, class_mean_classifier, load_dataset, random_convnet, random_mlp, save_dataset, synthetic_images,
    ConvFixture, Dataset, MlpFixture, CONVNET_RANGE_SCALE, MLP_RANGE_SCALE,
};
use linlif::layers::Shape3;
use linlif::mapping::{asymptotic_min_frequency, bias_table_literal, map_relu};
use linlif::network::{ann_forward_batch, run_snn_batch, LayerSpec, RunResult, Units};
use linlif::sweep::{error_scan as scan_windows, error_scan_cases, integer_grid, run_sweep, SweepAxis, SweepSpec};
use linlif::{
    bias_from_params, convert as convert_net, encode as encode_value, load_weights, min_firing_frequency, save_weights,
    slope_from_params, weighted_charge_sequence, AnnNetwork, CodingConfig, ConversionMode, NetworkSpec,
    NeuronParams, ReluParams, ResetMode, SimConfig, SnnNetwork, SpikeTrain,
};

use crate::out::{self, opt, Csv};
use crate::{CliError, CliResult, FixtureKind, Global, Mode, NeuronArgs, Reset};

/// Rate the blob classifier's strongest training output is scaled to.
const BLOB_OUT_RATE: f64 = 50.0;
const BLOB_RANGE_SCALE: f64 = 20.0;

fn image_shape() -> Shape3 {
    Shape3::new(8, 8, 1)
}

fn sim_config(g: &Global, default_scale: f64) -> SimConfig {
    SimConfig {
        dt: g.dt,
        t_window: g.t_window,
        range_scale: g.range_scale.unwrap_or(default_scale),
        seed: g.seed,
        strict: g.strict,
    }
}

pub fn neuron(g: &Global, a: &NeuronArgs, f_in: f64) -> CliResult {
    let cfg = CodingConfig::new(g.dt, g.t_window, g.range_scale.unwrap_or(1.0))?;
    let grid = cfg.grid()?;
    let input = encode_value(f_in, &cfg)?;
    let trains = vec![input; a.weights.len()];
    let charges = weighted_charge_sequence(&trains, &a.weights)?;
    for mode in ResetMode::ALL {
        let params = NeuronParams::new(a.c_m, a.g_l, a.v_th, mode)?;
        let (spikes, trace) = linlif::run(&params, &charges, grid)?;
        let mut csv = Csv::new("trace", 1, &["step", "t", "v", "fired"]);
        for (i, t, v, fired) in trace.rows() {
            csv.row([i.to_string(), t.to_string(), v.to_string(), u8::from(fired).to_string()]);
        }
        out::write(&g.out_dir, &format!("trace_{}.csv", mode.as_str()), csv.into_string())?;
        out::write(&g.out_dir, &format!("spikes_{}.txt", mode.as_str()), spikes.to_text())?;
        println!(
            "{}: {} spikes, {} Hz",
            mode.as_str(),
            spikes.count(),
            linlif::decode(&spikes)
        );
    }
    Ok(())
}

pub fn sweep(
    g: &Global,
    a: &NeuronArgs,
    axis: &str,
    values: Vec<f64>,
    freqs: Vec<f64>,
    modes: &[Reset],
) -> CliResult {
    let axis: SweepAxis = axis
        .parse()
        .map_err(|_| CliError::Usage(format!("unknown sweep axis `{axis}`")))?;
    let k = g.range_scale.unwrap_or(1.0);
    let freqs = if freqs.is_empty() { integer_grid(30) } else { freqs };
    let scaled = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|f| f * k).collect() };
    let (values, freqs) = match axis {
        SweepAxis::FIn if values.is_empty() => (scaled(freqs.clone()), freqs),
        SweepAxis::FIn => (scaled(values), freqs),
        // the scale itself is swept
        SweepAxis::RangeScale => (values, freqs),
        _ => (values, scaled(freqs)),
    };
    if values.is_empty() {
        return Err(CliError::Usage(format!("--values is required for a {} sweep", axis.as_str())));
    }
    let mut modes: Vec<ResetMode> = modes.iter().map(|&m| m.into()).collect();
    modes.dedup();
    let spec = SweepSpec {
        axis,
        values,
        neuron: NeuronParams::new(a.c_m, a.g_l, a.v_th, ResetMode::LinearReset)?,
        weights: a.weights.clone(),
        freqs,
        modes,
        dt: g.dt,
        t_window: g.t_window,
    };
    let rows = run_sweep(&spec)?;

    let mut summary = Csv::new(
        "sweep",
        1,
        &[
            "axis",
            "axis_value",
            "reset_mode",
            "measured_slope",
            "measured_min_freq",
            "predicted_slope",
            "predicted_bias",
            "predicted_min_freq",
            "l2_error",
        ],
    );
    let mut curves = Csv::new("sweep_curve", 1, &["axis", "axis_value", "reset_mode", "f_in", "drive", "rate", "relu"]);
    for r in &rows {
        summary.row([
            axis.as_str().to_string(),
            opt(r.axis_value),
            r.reset_mode.as_str().to_string(),
            opt(r.measured_slope),
            opt(r.measured_min_freq),
            r.predicted_slope.to_string(),
            opt(r.predicted_bias),
            opt(r.predicted_min_freq),
            r.l2_error.to_string(),
        ]);
        for p in &r.curve {
            curves.row([
                axis.as_str().to_string(),
                opt(r.axis_value),
                r.reset_mode.as_str().to_string(),
                p.f_in.to_string(),
                p.drive.to_string(),
                p.rate.to_string(),
                p.relu.to_string(),
            ]);
        }
        let at = r.axis_value.map_or(String::new(), |v| format!("{}={v} ", axis.as_str()));
        println!(
            "{at}{}: slope {} (predicted {}), min freq {} (predicted {})",
            r.reset_mode.as_str(),
            opt(r.measured_slope),
            r.predicted_slope,
            opt(r.measured_min_freq),
            opt(r.predicted_min_freq),
        );
    }
    out::write(&g.out_dir, &format!("sweep_{}.csv", axis.as_str()), summary.into_string())?;
    out::write(&g.out_dir, &format!("sweep_{}_curves.csv", axis.as_str()), curves.into_string())?;
    Ok(())
}

pub fn encode(g: &Global, x: Option<f64>, decode: Option<&Path>) -> CliResult {
    if let Some(path) = decode {
        let train = SpikeTrain::from_text(&out::read_to_string(path)?)?;
        println!("{} spikes over {} s: {} Hz", train.count(), train.grid().t_window(), linlif::decode(&train));
        return Ok(());
    }
    let x = x.ok_or_else(|| CliError::Usage("give --x or --decode".into()))?;
    let cfg = CodingConfig::new(g.dt, g.t_window, g.range_scale.unwrap_or(1.0))?;
    let train = encode_value(x, &cfg)?;
    out::write(&g.out_dir, "train.txt", train.to_text())?;
    println!("{} spikes, decoded {} Hz", train.count(), linlif::decode(&train));
    Ok(())
}

/// The mapping derivation gives a negative bias; the mapping table prints
/// the opposite sign. Both are reported, the derived one is used.
#[derive(Serialize)]
struct BiasReadings {
    derived: f64,
    table_literal: f64,
}

#[derive(Serialize)]
struct ReluToLif {
    direction: &'static str,
    relu: ReluParams,
    sum_w: f64,
    neuron: NeuronParams,
    residual: f64,
    bias_readings: BiasReadings,
}

#[derive(Serialize)]
struct LifToRelu {
    direction: &'static str,
    neuron: NeuronParams,
    sum_w: f64,
    slope: f64,
    bias_readings: BiasReadings,
    /// Long-window onset rate per input, `-b / sum_w`.
    min_freq_asymptotic: f64,
    /// Onset within `t_window`.
    min_freq_window: Option<f64>,
    t_window: f64,
}

fn readings(sum_w: f64, n: &NeuronParams) -> CliResult<BiasReadings> {
    let r = BiasReadings {
        derived: bias_from_params(sum_w, n)?,
        table_literal: bias_table_literal(sum_w, n)?,
    };
    eprintln!("bias readings: derived {} (used), table literal {}", r.derived, r.table_literal);
    Ok(r)
}

pub fn map(g: &Global, bias: Option<f64>, slope: f64, c_m: f64, g_l: f64, v_th: f64, sum_w: f64) -> CliResult {
    if let Some(b) = bias {
        let relu = ReluParams::new(b, slope)?;
        let m = map_relu(&relu, sum_w, v_th)?;
        let report = ReluToLif {
            direction: "relu_to_lif",
            relu,
            sum_w,
            neuron: m.neuron,
            residual: m.residual,
            bias_readings: readings(sum_w, &m.neuron)?,
        };
        println!("c_m {} g_l {} v_th {}", m.neuron.c_m, m.neuron.g_l, m.neuron.v_th);
        out::write_json(&g.out_dir, "map.json", &report)?;
    } else {
        let n = NeuronParams::new(c_m, g_l, v_th, ResetMode::LinearReset)?;
        let report = LifToRelu {
            direction: "lif_to_relu",
            neuron: n,
            sum_w,
            slope: slope_from_params(&n),
            bias_readings: readings(sum_w, &n)?,
            min_freq_asymptotic: asymptotic_min_frequency(sum_w, &n)?,
            min_freq_window: min_firing_frequency(&[sum_w], &n, g.t_window).ok(),
            t_window: g.t_window,
        };
        println!("slope {} bias {}", report.slope, report.bias_readings.derived);
        out::write_json(&g.out_dir, "map.json", &report)?;
    }
    Ok(())
}

enum Net {
    Ann(AnnNetwork),
    Snn(SnnNetwork),
}

fn load_net(spec_path: &Path, weights_path: &Path) -> CliResult<Net> {
    let spec = NetworkSpec::from_json(&out::read_to_string(spec_path)?)?;
    let bundle = load_weights(weights_path)?;
    let spiking = spec.layers.iter().find_map(|l| match l {
        LayerSpec::Dense { units, .. } | LayerSpec::Conv { units, .. } => Some(matches!(units, Units::Lif(_))),
        _ => None,
    });
    Ok(if spiking == Some(true) {
        Net::Snn(SnnNetwork::bind(&spec, &bundle)?)
    } else {
        Net::Ann(AnnNetwork::bind(&spec, &bundle)?)
    })
}

fn write_network<U: linlif::network::Unit>(
    g: &Global,
    name: &str,
    net: &linlif::Network<U>,
) -> CliResult {
    out::write(&g.out_dir, &format!("{name}.json"), net.to_spec().to_json()?)?;
    out::ensure_dir(&g.out_dir)?;
    save_weights(g.out_dir.join(format!("{name}.weights.json")), &net.weights_bundle())?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn convert(
    g: &Global,
    spec: &Path,
    weights: &Path,
    mode: Mode,
    g_l: f64,
    v_th: f64,
    reset: Reset,
    name: &str,
) -> CliResult {
    let Net::Ann(ann) = load_net(spec, weights)? else {
        return Err(CliError::Usage(format!("{} is already a spiking network", spec.display())));
    };
    let mode = match mode {
        Mode::ZeroBias => ConversionMode::ZeroBias { g_l, v_th },
        Mode::BiasToConductance => ConversionMode::BiasToConductance { v_th },
    };
    let snn = convert_net(&ann, mode)?.with_reset(reset.into());
    write_network(g, name, &snn)?;
    println!("converted {} layers into {name}.json", snn.layers().len());
    Ok(())
}

fn run_any(net: &Net, data: &Dataset, cfg: &SimConfig) -> CliResult<Vec<RunResult>> {
    Ok(match net {
        Net::Ann(n) => ann_forward_batch(n, &data.samples, cfg)?,
        Net::Snn(n) => run_snn_batch(n, &data.samples, cfg)?,
    })
}

pub fn run(g: &Global, spec: &Path, weights: &Path, dataset: &Path, name: &str) -> CliResult {
    let net = load_net(spec, weights)?;
    let data = load_dataset(dataset)?;
    let cfg = sim_config(g, MLP_RANGE_SCALE);
    let results = run_any(&net, &data, &cfg)?;
    let n_out = results.first().map_or(0, |r| r.layer_outputs.last().map_or(0, Vec::len));
    let mut columns = vec!["sample".to_string(), "label".into(), "predicted".into()];
    columns.extend((0..n_out).map(|j| format!("out_{j}")));
    let columns: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut csv = Csv::new("run", 1, &columns);
    for (i, (r, label)) in results.iter().zip(&data.labels).enumerate() {
        let mut fields = vec![i.to_string(), label.to_string(), r.label.to_string()];
        fields.extend(r.layer_outputs.last().into_iter().flatten().map(f64::to_string));
        csv.row(fields);
    }
    out::write(&g.out_dir, &format!("{name}.csv"), csv.into_string())?;
    let correct = results.iter().zip(&data.labels).filter(|(r, &l)| r.label == l).count();
    println!("{correct}/{} predictions match the dataset labels", data.len());
    Ok(())
}

pub fn compare(
    g: &Global,
    ann: (&Path, &Path),
    snn: (&Path, &Path),
    dataset: &Path,
    layer: Option<usize>,
    name: &str,
) -> CliResult {
    let Net::Ann(ann) = load_net(ann.0, ann.1)? else {
        return Err(CliError::Usage("--ann must describe a ReLU network".into()));
    };
    let Net::Snn(snn) = load_net(snn.0, snn.1)? else {
        return Err(CliError::Usage("--snn must describe a spiking network".into()));
    };
    if ann.layer_shapes() != snn.layer_shapes() {
        return Err(linlif::Error::Shape("the two networks have different layer shapes".into()).into());
    }
    let layer = layer
        .or_else(|| ann.hidden_layer_index())
        .unwrap_or(ann.layers().len() - 1);
    let data = load_dataset(dataset)?;
    let cfg = sim_config(g, MLP_RANGE_SCALE);
    let s = run_snn_batch(&snn, &data.samples, &cfg)?;
    let a = ann_forward_batch(&ann, &data.samples, &cfg)?;
    let report = equivalence_report(&s, &a, layer, ann.output_len(), cfg.t_window)?;
    out::write_json(&g.out_dir, &format!("{name}.json"), &report)?;
    let m = &report.matrices;
    out::write(&g.out_dir, &format!("{name}_neuron_corr.csv"), Csv::with_body("corr", 1, &m.neuron.to_csv()).into_string())?;
    out::write(&g.out_dir, &format!("{name}_data_corr.csv"), Csv::with_body("corr", 1, &m.data.to_csv()).into_string())?;
    out::write(
        &g.out_dir,
        &format!("{name}_confusion.csv"),
        Csv::with_body("confusion", 1, &report.confusion.to_csv()).into_string(),
    )?;
    println!(
        "label agreement {} over {} samples; mean neuron correlation {}",
        report.label_agreement,
        report.n_data,
        opt(report.neuron_correlation.as_ref().map(|c| c.mean)),
    );
    Ok(())
}

#[derive(Serialize)]
struct NetworkDisagreement {
    t_window: f64,
    range_scale: f64,
    seed: u64,
    n_samples: usize,
    label_agreement: f64,
    disagreement: f64,
}

pub fn error_scan(g: &Global, windows: &[f64], network_window: f64, n_samples: usize) -> CliResult {
    if windows.is_empty() {
        return Err(CliError::Usage("--windows is empty".into()));
    }
    let rows = scan_windows(&error_scan_cases(), windows, g.dt)?;
    let mut csv = Csv::new(
        "error_scan",
        1,
        &["t_window", "n_cases", "median_error", "max_error", "bound", "violations"],
    );
    for r in &rows {
        csv.row([
            r.t_window.to_string(),
            r.n_cases.to_string(),
            r.median_error.to_string(),
            r.max_error.to_string(),
            r.bound.to_string(),
            r.violations.to_string(),
        ]);
        println!(
            "T={}: median {} max {} bound {} ({} violations in {} cases)",
            r.t_window, r.median_error, r.max_error, r.bound, r.violations, r.n_cases
        );
    }
    out::write(&g.out_dir, "error_scan.csv", csv.into_string())?;

    if n_samples > 0 {
        let ann = random_mlp(&MlpFixture::default(), g.seed)?;
        let snn = convert_net(&ann, ConversionMode::ZeroBias { g_l: 0.0, v_th: 1.0 })?;
        let data = synthetic_images(n_samples, image_shape(), 10, g.seed)?;
        let cfg = sim_config(g, MLP_RANGE_SCALE).with_window(network_window);
        let s = run_snn_batch(&snn, &data.samples, &cfg)?;
        let a = ann_forward_batch(&ann, &data.samples, &cfg)?;
        let agree = s.iter().zip(&a).filter(|(x, y)| x.label == y.label).count() as f64 / n_samples as f64;
        let report = NetworkDisagreement {
            t_window: network_window,
            range_scale: cfg.range_scale,
            seed: g.seed,
            n_samples,
            label_agreement: agree,
            disagreement: 1.0 - agree,
        };
        println!("MLP at T={network_window}: disagreement {}", report.disagreement);
        out::write_json(&g.out_dir, "error_scan_network.json", &report)?;
    }
    Ok(())
}

pub fn gen_fixture(
    g: &Global,
    kind: FixtureKind,
    n: Option<usize>,
    dim: usize,
    hidden: usize,
    name: Option<String>,
) -> CliResult {
    let default_name = match kind {
        FixtureKind::Mlp => "mlp",
        FixtureKind::Convnet => "convnet",
        FixtureKind::Images => "images",
        FixtureKind::Blobs => "blobs",
        FixtureKind::BlobNet => "blob_net",
    };
    let name = name.unwrap_or_else(|| default_name.to_string());
    match kind {
        FixtureKind::Mlp => {
            write_network(g, &name, &random_mlp(&MlpFixture::default(), g.seed)?)?;
            println!("wrote {name}.json; run it with --range-scale {MLP_RANGE_SCALE}");
        }
        FixtureKind::Convnet => {
            write_network(g, &name, &random_convnet(&ConvFixture::default(), g.seed)?)?;
            println!("wrote {name}.json; run it with --range-scale {CONVNET_RANGE_SCALE}");
        }
        FixtureKind::Images => {
            let data = synthetic_images(n.unwrap_or(100), image_shape(), 10, g.seed)?;
            save_dataset(g.out_dir.join(&name), &data)?;
            println!("wrote {} samples to {name}/", data.len());
        }
        FixtureKind::Blobs => {
            let data = blob_dataset(n.unwrap_or(200), dim, g.seed)?;
            save_dataset(g.out_dir.join(&name), &data)?;
            println!("wrote {} samples to {name}/", data.len());
        }
        FixtureKind::BlobNet => {
            let data = blob_dataset(n.unwrap_or(200), dim, g.seed)?;
            let k = g.range_scale.unwrap_or(BLOB_RANGE_SCALE);
            let net = class_mean_classifier(&data, hidden, k, BLOB_OUT_RATE, g.seed)?;
            save_dataset(g.out_dir.join(format!("{name}_data")), &data)?;
            write_network(g, &name, &net)?;
            println!("wrote {name}.json and {name}_data/; run it with --range-scale {k}");
        }
    }
    Ok(())
}
