use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::circuit::{Circuit, NeuronId, THRESHOLD_FRACTION};
use super::neuron::NeuronState;
use super::raster::{Raster, SpikeEvent};
use crate::error::EngineError;

/// Current injected by a forced external spike, in weight units.
pub const EXTERNAL_DRIVE: f64 = 4.0;

/// Gaussian synaptic noise. Every synapse that delivers current in a tick
/// adds an independent sample with standard deviation `sigma * theta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseConfig {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn none() -> Self {
        NoiseConfig {
            sigma: 0.0,
            seed: 0,
        }
    }

    pub fn new(sigma: f64, seed: u64) -> Result<Self, EngineError> {
        let cfg = NoiseConfig { sigma, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.sigma.is_finite() && self.sigma >= 0.0 {
            Ok(())
        } else {
            Err(EngineError::BadSigma(self.sigma))
        }
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self::none()
    }
}

#[derive(Clone, Copy, Debug)]
struct Edge {
    post: u32,
    current: f64,
    delay: u32,
}

/// Ticked simulation of one circuit.
///
/// Pending synaptic input lives on a ring of `max_delay + 1` slots, one
/// accumulator and one arrival counter per neuron per slot.
pub struct Simulator<'c> {
    circuit: &'c Circuit,
    states: Vec<NeuronState>,
    edge_start: Vec<usize>,
    edges: Vec<Edge>,
    ring_current: Vec<Vec<f64>>,
    ring_arrivals: Vec<Vec<u32>>,
    external: BTreeMap<u64, BTreeSet<NeuronId>>,
    now: u64,
    noise: NoiseConfig,
    rng: ChaCha8Rng,
    raster: Raster,
}

impl<'c> Simulator<'c> {
    /// Fresh simulation at t = 0 with the circuit's stimuli already queued.
    pub fn new(circuit: &'c Circuit, noise: NoiseConfig) -> Result<Self, EngineError> {
        noise.validate()?;
        let n = circuit.neuron_count();
        let states = circuit
            .entries()
            .iter()
            .map(|e| NeuronState::resting(&e.spec))
            .collect();

        let mut sorted: Vec<_> = circuit.synapses().to_vec();
        sorted.sort_by_key(|s| s.pre);
        let mut edge_start = vec![0usize; n + 1];
        let mut edges = Vec::with_capacity(sorted.len());
        for s in &sorted {
            edge_start[s.pre.index() + 1] += 1;
            edges.push(Edge {
                post: s.post.0,
                current: s.weight * circuit.unit_current(s.post),
                delay: s.delay_ms,
            });
        }
        for i in 0..n {
            edge_start[i + 1] += edge_start[i];
        }
        let slots = circuit
            .synapses()
            .iter()
            .map(|s| s.delay_ms)
            .max()
            .unwrap_or(0) as usize
            + 1;

        let mut sim = Simulator {
            circuit,
            states,
            edge_start,
            edges,
            ring_current: vec![vec![0.0; n]; slots],
            ring_arrivals: vec![vec![0; n]; slots],
            external: BTreeMap::new(),
            now: 0,
            noise,
            rng: ChaCha8Rng::seed_from_u64(noise.seed),
            raster: Raster::new(circuit.labels()),
        };
        for &(t, id) in circuit.stimuli() {
            sim.schedule_external_spike(id, t)?;
        }
        Ok(sim)
    }

    pub fn now(&self) -> u64 {
        self.now
    }

    pub fn state(&self, id: NeuronId) -> NeuronState {
        self.states[id.index()]
    }

    /// Forces `neuron` to receive supra-threshold current at `time_ms`.
    pub fn schedule_external_spike(
        &mut self,
        neuron: NeuronId,
        time_ms: u64,
    ) -> Result<(), EngineError> {
        if !self.circuit.contains(neuron) {
            return Err(EngineError::UnknownNeuron(neuron));
        }
        if time_ms < self.now {
            return Err(EngineError::SpikeInPast {
                time: time_ms,
                now: self.now,
            });
        }
        self.external.entry(time_ms).or_default().insert(neuron);
        Ok(())
    }

    /// Advances one tick and returns the neurons that fired in it.
    pub fn step(&mut self) -> Vec<NeuronId> {
        let slot = (self.now % self.ring_current.len() as u64) as usize;
        let forced = self.external.remove(&self.now).unwrap_or_default();
        let entries = self.circuit.entries();
        let mut fired = Vec::new();

        for (i, state) in self.states.iter_mut().enumerate() {
            let mut current = self.ring_current[slot][i];
            if self.noise.sigma > 0.0 {
                let arrivals = self.ring_arrivals[slot][i];
                let scale = self.noise.sigma * entries[i].unit * THRESHOLD_FRACTION;
                for _ in 0..arrivals {
                    let z: f64 = StandardNormal.sample(&mut self.rng);
                    current += scale * z;
                }
            }
            let id = NeuronId(i as u32);
            if forced.contains(&id) {
                current += EXTERNAL_DRIVE * entries[i].unit;
            }
            if state.advance(&entries[i].spec, current) {
                fired.push(id);
            }
        }
        self.ring_current[slot].iter_mut().for_each(|c| *c = 0.0);
        self.ring_arrivals[slot].iter_mut().for_each(|c| *c = 0);

        let slots = self.ring_current.len() as u64;
        for &id in &fired {
            let i = id.index();
            for edge in &self.edges[self.edge_start[i]..self.edge_start[i + 1]] {
                let target = ((self.now + edge.delay as u64) % slots) as usize;
                self.ring_current[target][edge.post as usize] += edge.current;
                self.ring_arrivals[target][edge.post as usize] += 1;
            }
            self.raster.push(SpikeEvent {
                time_ms: self.now,
                neuron: id,
            });
        }
        self.now += 1;
        self.raster.set_duration(self.now);
        fired
    }

    pub fn run_for(&mut self, ticks: u64) {
        for _ in 0..ticks {
            self.step();
        }
    }

    pub fn raster(&self) -> &Raster {
        &self.raster
    }

    pub fn into_raster(self) -> Raster {
        self.raster
    }
}

/// Simulates `circuit` for `duration_ms` ticks from rest.
pub fn run(circuit: &Circuit, duration_ms: u64, noise: NoiseConfig) -> Result<Raster, EngineError> {
    let mut sim = Simulator::new(circuit, noise)?;
    sim.run_for(duration_ms);
    Ok(sim.into_raster())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::NeuronSpec;

    fn lif_circuit() -> Circuit {
        Circuit::new(NeuronSpec::lif()).unwrap()
    }

    #[test]
    fn external_spike_lands_on_its_tick() {
        let mut c = lif_circuit();
        let d0 = c.add_port_neuron("D0").unwrap();
        c.schedule_external_spike(d0, 5).unwrap();
        let r = run(&c, 20, NoiseConfig::none()).unwrap();
        assert_eq!(r.spike_times(d0), &[5]);
    }

    #[test]
    fn unscheduled_neuron_stays_silent() {
        let mut c = lif_circuit();
        c.add_port_neuron("D0").unwrap();
        let r = run(&c, 500, NoiseConfig::none()).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn duplicate_schedule_collapses() {
        let mut c = lif_circuit();
        let d0 = c.add_port_neuron("D0").unwrap();
        c.schedule_external_spike(d0, 7).unwrap();
        c.schedule_external_spike(d0, 7).unwrap();
        let r = run(&c, 20, NoiseConfig::none()).unwrap();
        assert_eq!(r.spike_times(d0), &[7]);
    }

    #[test]
    fn schedule_errors() {
        let mut c = lif_circuit();
        let d0 = c.add_neuron("D0");
        let mut sim = Simulator::new(&c, NoiseConfig::none()).unwrap();
        sim.run_for(10);
        assert_eq!(
            sim.schedule_external_spike(d0, 3),
            Err(EngineError::SpikeInPast { time: 3, now: 10 })
        );
        assert_eq!(
            sim.schedule_external_spike(NeuronId(4), 30),
            Err(EngineError::UnknownNeuron(NeuronId(4)))
        );
        assert!(c.schedule_external_spike(NeuronId(4), 30).is_err());
    }

    #[test]
    fn zero_duration_is_empty() {
        let mut c = lif_circuit();
        let d0 = c.add_neuron("D0");
        c.schedule_external_spike(d0, 0).unwrap();
        let r = run(&c, 0, NoiseConfig::none()).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn negative_sigma_rejected() {
        let c = lif_circuit();
        assert!(matches!(
            run(
                &c,
                1,
                NoiseConfig {
                    sigma: -0.1,
                    seed: 1
                }
            ),
            Err(EngineError::BadSigma(_))
        ));
    }
}
