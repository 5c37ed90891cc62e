//! Time-stepped simulation of neurons joined by delayed synapses.
//!
//! The tick is 1 ms. A spike emitted at tick `t` on a synapse with delay `d`
//! contributes its current exactly at tick `t + d`. Synaptic weights are given
//! in units of theta, the single-tick current a neuron needs to fire; see
//! [`THRESHOLD_FRACTION`] for how a unit relates to the calibrated threshold.

mod circuit;
mod neuron;
mod raster;
mod sim;

pub use circuit::{Circuit, NeuronId, PhaseTiming, Synapse, DEFAULT_DELTA_T, THRESHOLD_FRACTION};
/// Error from [`Raster::write_csv`].
pub use csv::Error as CsvError;
pub use neuron::{
    calibrate_theta, fires_from_rest, LifParams, NeuronSpec, NeuronState, SimpleModelParams,
    SIMPLE_MODEL_PEAK,
};
pub use raster::{Raster, SpikeEvent};
pub use sim::{run, NoiseConfig, Simulator, EXTERNAL_DRIVE};
