//! Functional blocks: pacemaker, coincidence gates, selector and decoder.
//!
//! All blocks run on the pacemaker's phase grid. Controls and data inputs are
//! sampled at phase 1; the A/B control layer fires one tick later, and its
//! outgoing delays are shortened by that tick so that the C layer fires
//! exactly on phase 2. A selector's output fires on phase 3, a decoder's
//! outputs on phase 2.

use crate::engine::{Circuit, NeuronId, PhaseTiming};
use crate::error::{BuildError, EngineError};

/// Weight of an inhibitory connection.
pub const INHIBITION: f64 = -2.0;

/// Time at which a freshly built pacemaker receives its seed spike (ms).
pub const KICK_START_MS: u64 = 1;

/// Delay from phase 1 into the A/B control layer.
const SAMPLE_DELAY: u32 = 1;

/// Largest AND fan-in that stays reliable under noise.
pub const MAX_AND_FAN_IN: usize = 4;

pub(crate) fn scoped(prefix: &str, symbol: &str) -> String {
    if prefix.is_empty() {
        symbol.to_string()
    } else {
        format!("{prefix}.{symbol}")
    }
}

#[derive(Clone, Debug)]
pub struct PacemakerHandle {
    /// P1..Pn; `phases[k]` fires on phase k+1.
    pub phases: Vec<NeuronId>,
    pub delta_t: u32,
    pub timing: PhaseTiming,
}

impl PacemakerHandle {
    pub fn phase_count(&self) -> usize {
        self.phases.len()
    }

    pub fn period(&self) -> u64 {
        self.timing.period()
    }

    /// Neuron of phase `k` (1-based).
    pub fn phase(&self, k: usize) -> NeuronId {
        self.phases[k - 1]
    }
}

/// Ring of `n` neurons, each exciting the next at theta after `delta_t`.
/// P1 is seeded by one external spike at [`KICK_START_MS`].
pub fn build_pacemaker(
    circuit: &mut Circuit,
    n: usize,
    delta_t: u32,
) -> Result<PacemakerHandle, BuildError> {
    if n < 2 {
        return Err(BuildError::TooFewPhases(n));
    }
    if delta_t < 1 {
        return Err(BuildError::DeltaTooShort {
            needed: 1,
            got: delta_t,
        });
    }
    let phases = (1..=n)
        .map(|k| circuit.add_port_neuron(&format!("P{k}")))
        .collect::<Result<Vec<_>, _>>()?;
    for k in 0..n {
        circuit.connect(phases[k], phases[(k + 1) % n], 1.0, delta_t)?;
    }
    circuit.schedule_external_spike(phases[0], KICK_START_MS)?;
    let timing = PhaseTiming {
        t0: KICK_START_MS,
        delta_t,
        phases: n,
    };
    circuit.set_timing(timing);
    Ok(PacemakerHandle {
        phases,
        delta_t,
        timing,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    And,
    Or,
}

#[derive(Clone, Debug)]
pub struct GateHandle {
    pub kind: GateKind,
    pub inputs: Vec<NeuronId>,
    pub output: NeuronId,
}

impl GateHandle {
    pub fn fan_in(&self) -> usize {
        self.inputs.len()
    }
}

/// Coincidence detector: each of `n` inputs contributes theta/n, so the
/// output fires `delta_t` after a tick in which all inputs spiked.
pub fn build_and_gate(circuit: &mut Circuit, n: usize) -> Result<GateHandle, BuildError> {
    build_and_gate_in(circuit, n, "")
}

pub fn build_and_gate_in(
    circuit: &mut Circuit,
    n: usize,
    prefix: &str,
) -> Result<GateHandle, BuildError> {
    if !(2..=MAX_AND_FAN_IN).contains(&n) {
        return Err(BuildError::AndFanIn(n));
    }
    build_gate(circuit, GateKind::And, n, 1.0 / n as f64, prefix)
}

/// Any single input spike drives the output at theta.
pub fn build_or_gate(circuit: &mut Circuit, n: usize) -> Result<GateHandle, BuildError> {
    build_or_gate_in(circuit, n, "")
}

pub fn build_or_gate_in(
    circuit: &mut Circuit,
    n: usize,
    prefix: &str,
) -> Result<GateHandle, BuildError> {
    if n == 0 {
        return Err(BuildError::OrFanIn);
    }
    build_gate(circuit, GateKind::Or, n, 1.0, prefix)
}

fn build_gate(
    circuit: &mut Circuit,
    kind: GateKind,
    n: usize,
    weight: f64,
    prefix: &str,
) -> Result<GateHandle, BuildError> {
    let delay = circuit.delta_t();
    let inputs = (0..n)
        .map(|j| circuit.add_port_neuron(&scoped(prefix, &format!("I{j}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let output = circuit.add_port_neuron(&scoped(prefix, "Y"))?;
    for &input in &inputs {
        circuit.connect(input, output, weight, delay)?;
    }
    Ok(GateHandle {
        kind,
        inputs,
        output,
    })
}

/// The A/B pairs shared by selector and decoder. For control `i`, `a[i]`
/// fires on phase 1 when S_i is silent and `b[i]` fires when S_i spikes.
#[derive(Clone, Debug)]
pub struct ControlLayer {
    pub controls: Vec<NeuronId>,
    pub a: Vec<NeuronId>,
    pub b: Vec<NeuronId>,
}

impl ControlLayer {
    /// Neuron that fires when control `i` equals bit `i` of `j`.
    fn term(&self, i: usize, j: usize) -> NeuronId {
        if (j >> i) & 1 == 1 {
            self.b[i]
        } else {
            self.a[i]
        }
    }
}

fn check_omega(omega: usize) -> Result<(), BuildError> {
    if (1..=3).contains(&omega) {
        Ok(())
    } else {
        Err(BuildError::Omega(omega))
    }
}

fn check_pacemaker(pacemaker: &PacemakerHandle, phases_needed: usize) -> Result<(), BuildError> {
    if pacemaker.phase_count() < phases_needed {
        return Err(BuildError::PacemakerTooShort {
            needed: phases_needed,
            got: pacemaker.phase_count(),
        });
    }
    if pacemaker.delta_t <= SAMPLE_DELAY {
        return Err(BuildError::DeltaTooShort {
            needed: SAMPLE_DELAY + 1,
            got: pacemaker.delta_t,
        });
    }
    Ok(())
}

fn build_control_layer(
    circuit: &mut Circuit,
    pacemaker: &PacemakerHandle,
    omega: usize,
    prefix: &str,
) -> Result<ControlLayer, BuildError> {
    let controls = (0..omega)
        .map(|i| circuit.add_port_neuron(&scoped(prefix, &format!("S{i}"))))
        .collect::<Result<Vec<_>, _>>()?;
    sample_controls(circuit, pacemaker, controls, prefix)
}

/// Adds the A/B sampling pair for each existing control neuron.
fn sample_controls(
    circuit: &mut Circuit,
    pacemaker: &PacemakerHandle,
    controls: Vec<NeuronId>,
    prefix: &str,
) -> Result<ControlLayer, BuildError> {
    let phi1 = pacemaker.phase(1);
    let omega = controls.len();
    let mut layer = ControlLayer {
        controls,
        a: Vec::with_capacity(omega),
        b: Vec::with_capacity(omega),
    };
    for (i, &s) in layer.controls.iter().enumerate() {
        let a = circuit.add_neuron(scoped(prefix, &format!("A{i}")));
        let b = circuit.add_neuron(scoped(prefix, &format!("B{i}")));
        circuit.connect(phi1, a, 1.0, SAMPLE_DELAY)?;
        circuit.connect(s, a, INHIBITION, SAMPLE_DELAY)?;
        circuit.connect(phi1, b, 0.5, SAMPLE_DELAY)?;
        circuit.connect(s, b, 0.5, SAMPLE_DELAY)?;
        layer.a.push(a);
        layer.b.push(b);
    }
    Ok(layer)
}

/// Adds the C layer: `c[j]` collects one term per control at
/// theta/(omega+1), arriving on phase 2.
fn build_minterm_layer(
    circuit: &mut Circuit,
    pacemaker: &PacemakerHandle,
    layer: &ControlLayer,
    prefix: &str,
    output_names: Option<&str>,
) -> Result<Vec<NeuronId>, BuildError> {
    let omega = layer.controls.len();
    let weight = 1.0 / (omega + 1) as f64;
    let delay = pacemaker.delta_t - SAMPLE_DELAY;
    let mut cs = Vec::with_capacity(1 << omega);
    for j in 0..1usize << omega {
        let c = match output_names {
            Some(stem) => circuit.add_port_neuron(&scoped(prefix, &format!("{stem}{j}")))?,
            None => circuit.add_neuron(scoped(prefix, &format!("C{j}"))),
        };
        for i in 0..omega {
            circuit.connect(layer.term(i, j), c, weight, delay)?;
        }
        cs.push(c);
    }
    Ok(cs)
}

#[derive(Clone, Debug)]
pub struct SelectorHandle {
    pub omega: usize,
    /// I0..I(2^omega - 1), sampled on phase 1.
    pub inputs: Vec<NeuronId>,
    /// `controls[i]` is S_i.
    pub controls: Vec<NeuronId>,
    pub a: Vec<NeuronId>,
    pub b: Vec<NeuronId>,
    pub c: Vec<NeuronId>,
    /// Fires on phase 3.
    pub output: NeuronId,
}

/// Connects one of `2^omega` inputs to a single output, chosen by the
/// controls present on phase 1. The output fires on phase 3 of the same cycle.
pub fn build_selector(
    circuit: &mut Circuit,
    pacemaker: &PacemakerHandle,
    omega: usize,
) -> Result<SelectorHandle, BuildError> {
    build_selector_in(circuit, pacemaker, omega, "")
}

pub fn build_selector_in(
    circuit: &mut Circuit,
    pacemaker: &PacemakerHandle,
    omega: usize,
    prefix: &str,
) -> Result<SelectorHandle, BuildError> {
    check_omega(omega)?;
    check_pacemaker(pacemaker, 3)?;
    let layer = build_control_layer(circuit, pacemaker, omega, prefix)?;
    let c = build_minterm_layer(circuit, pacemaker, &layer, prefix, None)?;
    let weight = 1.0 / (omega + 1) as f64;
    let mut inputs = Vec::with_capacity(c.len());
    for (j, &cj) in c.iter().enumerate() {
        let input = circuit.add_port_neuron(&scoped(prefix, &format!("I{j}")))?;
        circuit.connect(input, cj, weight, pacemaker.delta_t)?;
        inputs.push(input);
    }
    let output = circuit.add_port_neuron(&scoped(prefix, "Y"))?;
    for &cj in &c {
        circuit.connect(cj, output, 1.0, pacemaker.delta_t)?;
    }
    Ok(SelectorHandle {
        omega,
        inputs,
        controls: layer.controls,
        a: layer.a,
        b: layer.b,
        c,
        output,
    })
}

/// Ties `target` to constant '1': the phase-1 spike is delayed by one phase
/// so it lands on phase 2, the slot in which a phase-1 input would arrive.
pub fn tie_high(
    circuit: &mut Circuit,
    pacemaker: &PacemakerHandle,
    target: NeuronId,
    weight: f64,
) -> Result<(), BuildError> {
    circuit.connect(pacemaker.phase(1), target, weight, pacemaker.delta_t)?;
    Ok(())
}

/// Turns a selector into `Y = f(S)`: entry `j` of `table` (indexed by the
/// binary value of S_(omega-1)..S_0) set to true ties I_j's minterm to
/// constant '1'; false entries get no synapse at all.
pub fn configure_function_generator(
    circuit: &mut Circuit,
    pacemaker: &PacemakerHandle,
    selector: &SelectorHandle,
    table: &[bool],
) -> Result<(), BuildError> {
    let expected = 1usize << selector.omega;
    if table.len() != expected {
        return Err(BuildError::TruthTableSize {
            expected,
            got: table.len(),
        });
    }
    let weight = 1.0 / (selector.omega + 1) as f64;
    for (j, _) in table.iter().enumerate().filter(|(_, &bit)| bit) {
        tie_high(circuit, pacemaker, selector.c[j], weight)?;
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct DecoderHandle {
    pub omega: usize,
    /// Sampled on phase 1.
    pub input: NeuronId,
    pub controls: Vec<NeuronId>,
    pub a: Vec<NeuronId>,
    pub b: Vec<NeuronId>,
    /// Y0..Y(2^omega - 1), fire on phase 2.
    pub outputs: Vec<NeuronId>,
}

/// Routes the input spike to the one output selected by the controls.
pub fn build_decoder(
    circuit: &mut Circuit,
    pacemaker: &PacemakerHandle,
    omega: usize,
) -> Result<DecoderHandle, BuildError> {
    build_decoder_in(circuit, pacemaker, omega, "")
}

pub fn build_decoder_in(
    circuit: &mut Circuit,
    pacemaker: &PacemakerHandle,
    omega: usize,
    prefix: &str,
) -> Result<DecoderHandle, BuildError> {
    check_omega(omega)?;
    check_pacemaker(pacemaker, 2)?;
    let layer = build_control_layer(circuit, pacemaker, omega, prefix)?;
    finish_decoder(circuit, pacemaker, layer, prefix)
}

/// Decoder driven by existing neurons; `controls[i]` acts as S_i.
pub fn build_decoder_with_controls(
    circuit: &mut Circuit,
    pacemaker: &PacemakerHandle,
    controls: &[NeuronId],
    prefix: &str,
) -> Result<DecoderHandle, BuildError> {
    check_omega(controls.len())?;
    check_pacemaker(pacemaker, 2)?;
    for &s in controls {
        if !circuit.contains(s) {
            return Err(EngineError::UnknownNeuron(s).into());
        }
    }
    let layer = sample_controls(circuit, pacemaker, controls.to_vec(), prefix)?;
    finish_decoder(circuit, pacemaker, layer, prefix)
}

fn finish_decoder(
    circuit: &mut Circuit,
    pacemaker: &PacemakerHandle,
    layer: ControlLayer,
    prefix: &str,
) -> Result<DecoderHandle, BuildError> {
    let omega = layer.controls.len();
    let outputs = build_minterm_layer(circuit, pacemaker, &layer, prefix, Some("Y"))?;
    let input = circuit.add_port_neuron(&scoped(prefix, "I"))?;
    let weight = 1.0 / (omega + 1) as f64;
    for &y in &outputs {
        circuit.connect(input, y, weight, pacemaker.delta_t)?;
    }
    Ok(DecoderHandle {
        omega,
        input,
        controls: layer.controls,
        a: layer.a,
        b: layer.b,
        outputs,
    })
}

/// Holds the decoder's input at '1' so it decodes the controls alone.
pub fn tie_decoder_enable(
    circuit: &mut Circuit,
    pacemaker: &PacemakerHandle,
    decoder: &DecoderHandle,
) -> Result<(), BuildError> {
    let weight = 1.0 / (decoder.omega + 1) as f64;
    for &y in &decoder.outputs {
        tie_high(circuit, pacemaker, y, weight)?;
    }
    Ok(())
}
