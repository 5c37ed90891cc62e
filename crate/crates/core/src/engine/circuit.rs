use std::collections::BTreeMap;
use std::fmt;

use super::neuron::{calibrate_theta, NeuronSpec};
use crate::error::EngineError;

/// Fraction of one weight unit at which a neuron's calibrated threshold sits.
///
/// A weight of `1.0` delivers `theta / THRESHOLD_FRACTION`, so a complete
/// coincidence (the inputs summing to 1.0) clears the threshold by 1/8 of a
/// unit while the largest incomplete sum any block produces (3/4, a four-input
/// AND missing one input) stays 1/8 of a unit below it.
pub const THRESHOLD_FRACTION: f64 = 0.875;

/// Default phase spacing between pacemaker assemblies (ms).
pub const DEFAULT_DELTA_T: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NeuronId(pub u32);

impl NeuronId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NeuronId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Directed connection. `weight` is in units of theta of the post-synaptic
/// neuron (negative is inhibitory); `delay_ms` is the propagation delay.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Synapse {
    pub pre: NeuronId,
    pub post: NeuronId,
    pub weight: f64,
    pub delay_ms: u32,
}

#[derive(Clone, Debug)]
pub(crate) struct NeuronEntry {
    pub spec: NeuronSpec,
    pub label: String,
    /// Current delivered by a weight of 1.0.
    pub unit: f64,
}

/// Phase grid of a running pacemaker: phase `k` of cycle `c` starts at
/// `t0 + c * phases * delta_t + (k - 1) * delta_t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseTiming {
    pub t0: u64,
    pub delta_t: u32,
    pub phases: usize,
}

impl PhaseTiming {
    pub fn period(&self) -> u64 {
        self.phases as u64 * self.delta_t as u64
    }

    /// Onset of phase `phase` (1-based) in `cycle`.
    pub fn onset(&self, cycle: usize, phase: usize) -> u64 {
        debug_assert!(phase >= 1 && phase <= self.phases);
        self.t0 + cycle as u64 * self.period() + (phase as u64 - 1) * self.delta_t as u64
    }

    /// `(cycle, phase)` for a time that falls exactly on a phase onset.
    pub fn phase_at(&self, time: u64) -> Option<(usize, usize)> {
        if time < self.t0 {
            return None;
        }
        let rel = time - self.t0;
        if !rel.is_multiple_of(self.delta_t as u64) {
            return None;
        }
        let slot = rel / self.delta_t as u64;
        Some((
            (slot / self.phases as u64) as usize,
            (slot % self.phases as u64) as usize + 1,
        ))
    }
}

/// Neuron table, synapse table, named ports and pre-scheduled stimuli.
#[derive(Clone, Debug)]
pub struct Circuit {
    neurons: Vec<NeuronEntry>,
    synapses: Vec<Synapse>,
    ports: BTreeMap<String, NeuronId>,
    stimuli: Vec<(u64, NeuronId)>,
    default_spec: NeuronSpec,
    delta_t: u32,
    timing: Option<PhaseTiming>,
    calibrated: Vec<(NeuronSpec, f64)>,
}

impl Circuit {
    pub fn new(default_spec: NeuronSpec) -> Result<Self, EngineError> {
        Self::with_delta_t(default_spec, DEFAULT_DELTA_T)
    }

    pub fn with_delta_t(default_spec: NeuronSpec, delta_t: u32) -> Result<Self, EngineError> {
        if delta_t == 0 {
            return Err(EngineError::ZeroDelay);
        }
        let mut circuit = Circuit {
            neurons: Vec::new(),
            synapses: Vec::new(),
            ports: BTreeMap::new(),
            stimuli: Vec::new(),
            default_spec,
            delta_t,
            timing: None,
            calibrated: Vec::new(),
        };
        circuit.theta_for(&default_spec)?;
        Ok(circuit)
    }

    pub fn delta_t(&self) -> u32 {
        self.delta_t
    }

    pub fn default_spec(&self) -> &NeuronSpec {
        &self.default_spec
    }

    /// Calibrated theta for `spec`, computed once per distinct spec.
    pub fn theta_for(&mut self, spec: &NeuronSpec) -> Result<f64, EngineError> {
        if let Some((_, theta)) = self.calibrated.iter().find(|(s, _)| s == spec) {
            return Ok(*theta);
        }
        let theta = calibrate_theta(spec)?;
        self.calibrated.push((*spec, theta));
        Ok(theta)
    }

    pub fn add_neuron(&mut self, label: impl Into<String>) -> NeuronId {
        let spec = self.default_spec;
        self.add_neuron_with(spec, label)
            .expect("default spec was calibrated at construction")
    }

    pub fn add_neuron_with(
        &mut self,
        spec: NeuronSpec,
        label: impl Into<String>,
    ) -> Result<NeuronId, EngineError> {
        let theta = self.theta_for(&spec)?;
        let id = NeuronId(self.neurons.len() as u32);
        self.neurons.push(NeuronEntry {
            spec,
            label: label.into(),
            unit: theta / THRESHOLD_FRACTION,
        });
        Ok(id)
    }

    /// Adds a neuron labelled `name` and registers it as a port.
    pub fn add_port_neuron(&mut self, name: &str) -> Result<NeuronId, EngineError> {
        if self.ports.contains_key(name) {
            return Err(EngineError::DuplicatePort(name.to_string()));
        }
        let id = self.add_neuron(name);
        self.ports.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_port(&mut self, name: &str, id: NeuronId) -> Result<(), EngineError> {
        self.check(id)?;
        if self.ports.contains_key(name) {
            return Err(EngineError::DuplicatePort(name.to_string()));
        }
        self.ports.insert(name.to_string(), id);
        Ok(())
    }

    pub fn port(&self, name: &str) -> Result<NeuronId, EngineError> {
        self.ports
            .get(name)
            .copied()
            .ok_or_else(|| EngineError::UnknownPort(name.to_string()))
    }

    pub fn ports(&self) -> impl Iterator<Item = (&str, NeuronId)> {
        self.ports.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn connect(
        &mut self,
        pre: NeuronId,
        post: NeuronId,
        weight: f64,
        delay_ms: u32,
    ) -> Result<(), EngineError> {
        self.check(pre)?;
        self.check(post)?;
        if delay_ms == 0 {
            return Err(EngineError::ZeroDelay);
        }
        if weight == 0.0 || !weight.is_finite() {
            return Err(EngineError::BadWeight(weight));
        }
        self.synapses.push(Synapse {
            pre,
            post,
            weight,
            delay_ms,
        });
        Ok(())
    }

    /// Queues a forced spike of `neuron` at `time_ms` for every run of this
    /// circuit.
    pub fn schedule_external_spike(
        &mut self,
        neuron: NeuronId,
        time_ms: u64,
    ) -> Result<(), EngineError> {
        self.check(neuron)?;
        self.stimuli.push((time_ms, neuron));
        Ok(())
    }

    pub fn clear_stimuli(&mut self) {
        self.stimuli.clear();
    }

    pub fn stimuli(&self) -> &[(u64, NeuronId)] {
        &self.stimuli
    }

    pub fn neuron_count(&self) -> usize {
        self.neurons.len()
    }

    pub fn synapses(&self) -> &[Synapse] {
        &self.synapses
    }

    pub fn label(&self, id: NeuronId) -> &str {
        &self.neurons[id.index()].label
    }

    pub fn labels(&self) -> Vec<String> {
        self.neurons.iter().map(|n| n.label.clone()).collect()
    }

    pub fn spec(&self, id: NeuronId) -> &NeuronSpec {
        &self.neurons[id.index()].spec
    }

    /// Current delivered to `id` by a synapse of weight 1.0.
    pub fn unit_current(&self, id: NeuronId) -> f64 {
        self.neurons[id.index()].unit
    }

    pub fn timing(&self) -> Option<PhaseTiming> {
        self.timing
    }

    pub(crate) fn set_timing(&mut self, timing: PhaseTiming) {
        self.timing = Some(timing);
    }

    pub(crate) fn entries(&self) -> &[NeuronEntry] {
        &self.neurons
    }

    pub fn contains(&self, id: NeuronId) -> bool {
        id.index() < self.neurons.len()
    }

    fn check(&self, id: NeuronId) -> Result<(), EngineError> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(EngineError::UnknownNeuron(id))
        }
    }
}
