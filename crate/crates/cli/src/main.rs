//! `linlif` command-line front-end for single-neuron experiments and
//! network conversion checks. Every command writes plain
//! CSV / JSON files into `--out-dir`; nothing depends on wall-clock time,
//! so re-running with the same flags gives byte-identical files.

mod cmd;
mod out;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "linlif", version, about = "Linear LIF neurons and ReLU-to-SNN conversion")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Simulation step in seconds.
    #[arg(long, global = true, default_value_t = 0.01)]
    pub dt: f64,
    /// Observation window in seconds.
    #[arg(long, global = true, default_value_t = 3.0)]
    pub t_window: f64,
    /// Hz per unit input. Defaults to 1 for single-neuron commands and to
    /// the fixture's own scale for network commands.
    #[arg(long, global = true)]
    pub range_scale: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Reject network inputs outside [0, 1] instead of clamping them.
    #[arg(long, global = true)]
    pub strict: bool,
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct NeuronArgs {
    #[arg(long, default_value_t = 1.0)]
    pub c_m: f64,
    #[arg(long, default_value_t = 3.0)]
    pub g_l: f64,
    #[arg(long, default_value_t = 1.0)]
    pub v_th: f64,
    /// Input weights; every input fires at the same rate.
    #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.2])]
    pub weights: Vec<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reset {
    Linear,
    Zero,
}

impl From<Reset> for linlif::ResetMode {
    fn from(r: Reset) -> Self {
        match r {
            Reset::Linear => linlif::ResetMode::LinearReset,
            Reset::Zero => linlif::ResetMode::ResetToZero,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Shared leak for every neuron; the ANN must have zero biases.
    ZeroBias,
    /// Each unit's bias becomes its own membrane conductance.
    BiasToConductance,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FixtureKind {
    /// 64-32-10 ReLU MLP.
    Mlp,
    /// Conv 4@3x3, 2x2 max-pool, dense to 10.
    Convnet,
    /// 8x8 synthetic ten-class images.
    Images,
    /// Two-class blob data.
    Blobs,
    /// Two-class blob data plus a classifier fitted to it.
    BlobNet,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one neuron under periodic input in both reset modes.
    Neuron {
        #[command(flatten)]
        neuron: NeuronArgs,
        /// Rate of every input, in units of the range scale.
        #[arg(long, default_value_t = 10.0)]
        f_in: f64,
    },
    /// Response curves over one parameter axis.
    Sweep {
        #[command(flatten)]
        neuron: NeuronArgs,
        /// One of f_in, g_l, c_m, range_scale, t_window.
        #[arg(long, default_value = "f_in")]
        axis: String,
        /// Axis values; an f_in sweep defaults to 1..=30.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        /// Input rates of each curve (before the range scale).
        #[arg(long, value_delimiter = ',')]
        freqs: Vec<f64>,
        #[arg(long, value_delimiter = ',', value_enum, default_values = ["linear", "zero"])]
        modes: Vec<Reset>,
    },
    /// Encode a value as a periodic spike train, or decode a train file.
    Encode {
        /// Value to encode at range_scale * x Hz.
        #[arg(long, conflicts_with = "decode", required_unless_present = "decode")]
        x: Option<f64>,
        /// Spike train file to decode instead.
        #[arg(long)]
        decode: Option<PathBuf>,
    },
    /// Map a ReLU unit to LIF parameters, or LIF parameters to a ReLU unit.
    Map {
        /// ReLU bias; when given, maps ReLU -> LIF.
        #[arg(long, allow_hyphen_values = true)]
        bias: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        slope: f64,
        #[arg(long, default_value_t = 1.0)]
        c_m: f64,
        #[arg(long, default_value_t = 3.0)]
        g_l: f64,
        #[arg(long, default_value_t = 1.0)]
        v_th: f64,
        /// Summed input weight of the unit.
        #[arg(long, default_value_t = 0.5)]
        sum_w: f64,
    },
    /// Convert a ReLU network to a spiking network.
    Convert {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::ZeroBias)]
        mode: Mode,
        /// Leak of every neuron under zero-bias conversion.
        #[arg(long, default_value_t = 0.0)]
        g_l: f64,
        #[arg(long, default_value_t = 1.0)]
        v_th: f64,
        #[arg(long, value_enum, default_value_t = Reset::Linear)]
        reset: Reset,
        /// Stem of the output files.
        #[arg(long, default_value = "snn")]
        name: String,
    },
    /// Run a network (ReLU or spiking) over a dataset.
    Run {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "run")]
        name: String,
    },
    /// Differential run of a spiking network against its ReLU source.
    Compare {
        #[arg(long)]
        ann: PathBuf,
        #[arg(long)]
        ann_weights: PathBuf,
        #[arg(long)]
        snn: PathBuf,
        #[arg(long)]
        snn_weights: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// Layer whose outputs are correlated; defaults to the hidden layer.
        #[arg(long)]
        layer: Option<usize>,
        #[arg(long, default_value = "compare")]
        name: String,
    },
    /// Decoding error against the 1/T bound over a range of windows.
    ErrorScan {
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 3.0, 10.0])]
        windows: Vec<f64>,
        /// Window of the MLP disagreement check.
        #[arg(long, default_value_t = 10.0)]
        network_window: f64,
        /// Samples in the MLP disagreement check; 0 skips it.
        #[arg(long, default_value_t = 200)]
        n_samples: usize,
    },
    /// Write a seeded synthetic network or dataset.
    GenFixture {
        #[arg(value_enum)]
        kind: FixtureKind,
        /// Samples in a generated dataset.
        #[arg(long)]
        n: Option<usize>,
        /// Feature count of blob data.
        #[arg(long, default_value_t = 16)]
        dim: usize,
        /// Hidden width of the blob classifier.
        #[arg(long, default_value_t = 8)]
        hidden: usize,
        /// Stem of the output files; defaults to the kind.
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] linlif::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use linlif::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_domain() => 3,
            CliError::Core(E::Shape(_) | E::GridMismatch(_)) => 3,
            // input files that cannot be read or parsed
            CliError::Core(_) => 4,
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

fn dispatch(cli: Cli) -> CliResult {
    let g = &cli.global;
    match cli.command {
        Command::Neuron { neuron, f_in } => cmd::neuron(g, &neuron, f_in),
        Command::Sweep { neuron, axis, values, freqs, modes } => {
            cmd::sweep(g, &neuron, &axis, values, freqs, &modes)
        }
        Command::Encode { x, decode } => cmd::encode(g, x, decode.as_deref()),
        Command::Map { bias, slope, c_m, g_l, v_th, sum_w } => cmd::map(g, bias, slope, c_m, g_l, v_th, sum_w),
        Command::Convert { spec, weights, mode, g_l, v_th, reset, name } => {
            cmd::convert(g, &spec, &weights, mode, g_l, v_th, reset, &name)
        }
        Command::Run { spec, weights, dataset, name } => cmd::run(g, &spec, &weights, &dataset, &name),
        Command::Compare { ann, ann_weights, snn, snn_weights, dataset, layer, name } => {
            cmd::compare(g, (&ann, &ann_weights), (&snn, &snn_weights), &dataset, layer, &name)
        }
        Command::ErrorScan { windows, network_window, n_samples } => {
            cmd::error_scan(g, &windows, network_window, n_samples)
        }
        Command::GenFixture { kind, n, dim, hidden, name } => cmd::gen_fixture(g, kind, n, dim, hidden, name),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors and 0 on --help
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
