//! Linear leaky-integrate-and-fire (LIF) neurons with an exact parameter
//! mapping onto ReLU units. A ReLU network converted this way can be run
//! side by side with its source and checked for equivalence.
//!
//! Module map:
//!
//! - [`neuron`]: the LIF neuron, exact decay stepping, both reset modes
//! - [`coding`]: periodic rate coding on a fixed time grid
//! - [`mapping`]: ReLU unit and the weight / bias / slope mapping
//! - [`layers`]: layer kernels, spiking and ReLU
//! - [`network`]: network description, conversion, simulation
//! - [`weights`]: manifest + binary blob weight files
//! - [`eval`]: correlation, confusion matrices, quantization error
//! - [`sweep`]: single-neuron response sweeps
//! - [`fixtures`]: seeded synthetic networks and datasets

pub mod coding;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod layers;
pub mod mapping;
pub mod network;
pub mod neuron;
pub mod sweep;
pub mod weights;

pub use coding::{decode, encode, encode_rate, weighted_charge_sequence, CodingConfig, SpikeTrain, TimeGrid};
pub use error::{Error, Result};
pub use mapping::{
    bias_from_params, min_firing_frequency, params_from_relu, relu_an, slope_from_params, MappingResult,
    ReluParams,
};
pub use neuron::{closed_form_mp, decay_factor, run, step, MembraneTrace, NeuronParams, NeuronState, ResetMode};
pub use network::{
    ann_forward, convert, run_snn, AnnNetwork, ConversionMode, Network, NetworkSpec, RunResult, SimConfig,
    SnnNetwork,
};
pub use weights::{load_weights, save_weights, WeightsBundle};
pub use eval::{
    confusion_matrix, correlation, correlation_matrices, equivalence_report, error_report, quantization_bound,
    ConfusionMatrix, EquivalenceReport,
};
