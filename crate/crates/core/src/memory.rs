//! Activation-based memory built from bistable loops.
//!
//! A cell holds a kernel pair (Ka, Kb) and one loop pair (a_j, b_j) per bit.
//! Ka and Kb excite each other at theta every `delta_t`, and each of them
//! supplies half of the drive of the opposite bit column, so a bit spike can
//! only keep circulating while the kernel does. One spike is in flight per
//! loop: exactly one of each pair fires on every phase onset.
//!
//! Timing of one transaction (onsets of cycle `c`):
//!
//! | phase   | event                                                    |
//! |---------|----------------------------------------------------------|
//! | 1       | stream spikes on D3..D0, M/R/E, nPi/Pi                   |
//! | 1 + 1ms | decoder A/B layers                                       |
//! | 2       | decoder outputs                                          |
//! | 3       | one `Sel_k`                                              |
//! | 4       | cell gates GK, GM, GR, GE (commands delayed by 3 phases) |
//! | 5       | store/erase inhibition of the whole cell; read answer    |
//! | 6       | stored loops restart (phase 1 of the next cycle for n=5) |
//!
//! A store therefore overwrites: the old loops are silenced one phase before
//! the new kernel and bits start. An erase inhibits the cell twice, one phase
//! apart, through a relay neuron.

use std::ops::Range;

use crate::blocks::{
    build_decoder_with_controls, build_pacemaker, tie_decoder_enable, DecoderHandle,
    PacemakerHandle, INHIBITION,
};
use crate::engine::{run, Circuit, NeuronId, NeuronSpec, NoiseConfig, PhaseTiming, Raster};
use crate::error::{BuildError, EngineError};
use crate::stream::{compile_stream, CodeScheme, ScheduledSpike, StreamLine, StreamOp, CODE_WIDTH};

pub const PRIME_ANSWER: &str = "PiAns";
pub const NON_PRIME_ANSWER: &str = "nPiAns";

/// Drive used to start stored loops; it overcomes the residue of the
/// clearing inhibition one phase earlier.
const STORE_DRIVE: f64 = 2.0;

/// Phases a command spike waits before reaching the cell gates.
const COMMAND_LAG_PHASES: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BitLoop {
    pub a: NeuronId,
    pub b: NeuronId,
}

#[derive(Clone, Debug)]
pub struct MemoryCellHandle {
    pub index: usize,
    pub ka: NeuronId,
    pub kb: NeuronId,
    pub bits: Vec<BitLoop>,
    /// Sel AND M: clears the cell and starts the kernel.
    pub store_gate: NeuronId,
    /// GM_j: Sel AND M AND input j.
    pub write_gates: Vec<NeuronId>,
    /// GR_j: Sel AND R AND trapped bit j. These are the cell outputs.
    pub read_gates: Vec<NeuronId>,
    /// GE: Sel AND E.
    pub erase_gate: NeuronId,
    pub erase_relay: NeuronId,
}

impl MemoryCellHandle {
    pub fn neurons(&self) -> Vec<NeuronId> {
        let mut ids = vec![self.ka, self.kb];
        for bit in &self.bits {
            ids.push(bit.a);
            ids.push(bit.b);
        }
        ids
    }

    /// Every neuron of the cell, gates included.
    pub fn all_neurons(&self) -> Vec<NeuronId> {
        let mut ids = self.neurons();
        ids.push(self.store_gate);
        ids.extend(&self.write_gates);
        ids.extend(&self.read_gates);
        ids.push(self.erase_gate);
        ids.push(self.erase_relay);
        ids
    }

    /// Loop activity observed in `window`.
    pub fn activity(&self, raster: &Raster, window: Range<u64>) -> CellActivity {
        CellActivity {
            kernel: raster.fired_in(self.ka, window.clone())
                || raster.fired_in(self.kb, window.clone()),
            bits: self
                .bits
                .iter()
                .map(|bit| {
                    raster.fired_in(bit.a, window.clone()) || raster.fired_in(bit.b, window.clone())
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellActivity {
    pub kernel: bool,
    pub bits: Vec<bool>,
}

/// Sources feeding a cell's gates, each with the delay that puts its spike
/// on the gate phase.
#[derive(Clone, Debug)]
pub struct CellInputs {
    pub select: (NeuronId, u32),
    pub memorize: (NeuronId, u32),
    pub retrieve: (NeuronId, u32),
    pub erase: (NeuronId, u32),
    pub bits: Vec<(NeuronId, u32)>,
}

fn cell_label(symbol: &str, index: usize) -> String {
    format!("{symbol}_{index}")
}

/// Kernel, bit loops, gates and their internal wiring. Gate inputs are
/// attached separately with [`wire_cell_inputs`].
fn build_cell_core(
    circuit: &mut Circuit,
    pacemaker: &PacemakerHandle,
    n_bits: usize,
    index: usize,
) -> Result<MemoryCellHandle, BuildError> {
    if n_bits == 0 {
        return Err(BuildError::NoBits);
    }
    let dt = pacemaker.delta_t;
    let ka = circuit.add_port_neuron(&cell_label("Ka", index))?;
    let kb = circuit.add_port_neuron(&cell_label("Kb", index))?;
    let mut bits = Vec::with_capacity(n_bits);
    for j in 1..=n_bits {
        let a = circuit.add_port_neuron(&format!("a_{j}_{index}"))?;
        let b = circuit.add_port_neuron(&format!("b_{j}_{index}"))?;
        bits.push(BitLoop { a, b });
    }
    let store_gate = circuit.add_port_neuron(&cell_label("GK", index))?;
    let write_gates = (1..=n_bits)
        .map(|j| circuit.add_port_neuron(&format!("GM_{j}_{index}")))
        .collect::<Result<Vec<_>, _>>()?;
    let read_gates = (1..=n_bits)
        .map(|j| circuit.add_port_neuron(&format!("GR_{j}_{index}")))
        .collect::<Result<Vec<_>, _>>()?;
    let erase_gate = circuit.add_port_neuron(&cell_label("GE", index))?;
    let erase_relay = circuit.add_port_neuron(&cell_label("ER", index))?;

    let cell = MemoryCellHandle {
        index,
        ka,
        kb,
        bits,
        store_gate,
        write_gates,
        read_gates,
        erase_gate,
        erase_relay,
    };

    circuit.connect(ka, kb, 1.0, dt)?;
    circuit.connect(kb, ka, 1.0, dt)?;
    for (bit, &read) in cell.bits.iter().zip(&cell.read_gates) {
        circuit.connect(bit.a, bit.b, 0.5, dt)?;
        circuit.connect(bit.b, bit.a, 0.5, dt)?;
        circuit.connect(ka, bit.b, 0.5, dt)?;
        circuit.connect(kb, bit.a, 0.5, dt)?;
        circuit.connect(bit.a, read, 1.0 / 3.0, dt)?;
        circuit.connect(bit.b, read, 1.0 / 3.0, dt)?;
    }

    let loops = cell.neurons();
    for &n in &loops {
        circuit.connect(store_gate, n, INHIBITION, dt)?;
        circuit.connect(erase_gate, n, INHIBITION, dt)?;
        circuit.connect(erase_relay, n, INHIBITION, dt)?;
    }
    circuit.connect(erase_gate, erase_relay, 1.0, dt)?;
    circuit.connect(store_gate, ka, STORE_DRIVE, 2 * dt)?;
    for (bit, &write) in cell.bits.iter().zip(&cell.write_gates) {
        circuit.connect(write, bit.a, STORE_DRIVE, 2 * dt)?;
    }
    Ok(cell)
}

/// Attaches select, command and data sources to the cell gates.
pub fn wire_cell_inputs(
    circuit: &mut Circuit,
    cell: &MemoryCellHandle,
    inputs: &CellInputs,
) -> Result<(), BuildError> {
    if inputs.bits.len() != cell.bits.len() {
        return Err(BuildError::Engine(EngineError::InvalidNeuron(format!(
            "cell has {} bits, {} bit inputs given",
            cell.bits.len(),
            inputs.bits.len()
        ))));
    }
    let third = 1.0 / 3.0;
    let (sel, sel_delay) = inputs.select;
    let (m, m_delay) = inputs.memorize;
    let (r, r_delay) = inputs.retrieve;
    let (e, e_delay) = inputs.erase;

    circuit.connect(sel, cell.store_gate, 0.5, sel_delay)?;
    circuit.connect(m, cell.store_gate, 0.5, m_delay)?;
    circuit.connect(sel, cell.erase_gate, 0.5, sel_delay)?;
    circuit.connect(e, cell.erase_gate, 0.5, e_delay)?;
    for (j, &(src, delay)) in inputs.bits.iter().enumerate() {
        let write = cell.write_gates[j];
        circuit.connect(sel, write, third, sel_delay)?;
        circuit.connect(m, write, third, m_delay)?;
        circuit.connect(src, write, third, delay)?;
        let read = cell.read_gates[j];
        circuit.connect(sel, read, third, sel_delay)?;
        circuit.connect(r, read, third, r_delay)?;
    }
    Ok(())
}

fn check_memory_pacemaker(pacemaker: &PacemakerHandle) -> Result<(), BuildError> {
    if pacemaker.phase_count() < 4 {
        return Err(BuildError::PacemakerTooShort {
            needed: 4,
            got: pacemaker.phase_count(),
        });
    }
    if pacemaker.delta_t < 2 {
        return Err(BuildError::DeltaTooShort {
            needed: 2,
            got: pacemaker.delta_t,
        });
    }
    Ok(())
}

/// A free-standing cell with `n_bits` loops.
///
/// Its input ports `Sel`, `M`, `R`, `E` and `I1..In` are all expected on
/// phase 1 and reach the gates on phase 4. Outputs are the read gates
/// (`GR_j_0`), which fire on phase 4 while a read is in progress.
pub fn build_memory_cell(
    circuit: &mut Circuit,
    pacemaker: &PacemakerHandle,
    n_bits: usize,
) -> Result<MemoryCellHandle, BuildError> {
    check_memory_pacemaker(pacemaker)?;
    let cell = build_cell_core(circuit, pacemaker, n_bits, 0)?;
    let lag = COMMAND_LAG_PHASES * pacemaker.delta_t;
    let mut port = |name: &str| -> Result<(NeuronId, u32), BuildError> {
        Ok((circuit.add_port_neuron(name)?, lag))
    };
    let select = port("Sel")?;
    let memorize = port("M")?;
    let retrieve = port("R")?;
    let erase = port("E")?;
    let bits = (1..=n_bits)
        .map(|j| port(&format!("I{j}")))
        .collect::<Result<Vec<_>, _>>()?;
    wire_cell_inputs(
        circuit,
        &cell,
        &CellInputs {
            select,
            memorize,
            retrieve,
            erase,
            bits,
        },
    )?;
    Ok(cell)
}

/// Cell addressed by D3..D0 read as a plain binary number.
pub fn cell_index(bits: [bool; CODE_WIDTH]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Phase (1-based) on which the `a` neuron of a trapped bit fires on its
/// `k`-th round trip, given the phase of its first spike. Each round trip
/// takes two phases, so with an odd phase count the `a` column walks through
/// every phase, while with an even count it stays on phases of one parity.
pub fn phase_of_trapped_spike(store_phase: usize, k: usize, n_phases: usize) -> usize {
    (store_phase - 1 + 2 * k) % n_phases + 1
}

#[derive(Clone, Debug)]
pub struct DraftMemoryHandle {
    pub pacemaker: PacemakerHandle,
    /// D0..D3; `data[i]` carries bit i.
    pub data: Vec<NeuronId>,
    pub memorize: NeuronId,
    pub retrieve: NeuronId,
    pub erase: NeuronId,
    pub non_prime: NeuronId,
    pub prime: NeuronId,
    /// Decodes D3 D2.
    pub high: DecoderHandle,
    /// Decodes D1 D0.
    pub low: DecoderHandle,
    pub select: Vec<NeuronId>,
    pub cells: Vec<MemoryCellHandle>,
    pub non_prime_answer: NeuronId,
    pub prime_answer: NeuronId,
}

impl DraftMemoryHandle {
    pub fn line(&self, line: StreamLine) -> NeuronId {
        match line {
            StreamLine::Data(i) => self.data[i as usize],
            StreamLine::Memorize => self.memorize,
            StreamLine::Retrieve => self.retrieve,
            StreamLine::Erase => self.erase,
            StreamLine::NonPrime => self.non_prime,
            StreamLine::Prime => self.prime,
        }
    }

    /// Queues compiled stream spikes on the input lines.
    pub fn schedule(
        &self,
        circuit: &mut Circuit,
        spikes: &[ScheduledSpike],
    ) -> Result<(), EngineError> {
        for s in spikes {
            circuit.schedule_external_spike(self.line(s.line), s.time_ms)?;
        }
        Ok(())
    }

    /// Loop activity of every cell once transaction at `onset` has settled:
    /// the window starts when a stored loop restarts and spans one full
    /// kernel round trip, ending before the next transaction touches a cell.
    pub fn settled_activity(&self, raster: &Raster, onset: u64) -> Vec<CellActivity> {
        let dt = self.pacemaker.delta_t as u64;
        let window = onset + 5 * dt..onset + 7 * dt;
        self.cells
            .iter()
            .map(|cell| cell.activity(raster, window.clone()))
            .collect()
    }

    /// Stream input neurons, D3 first.
    pub fn stream_neurons(&self) -> Vec<NeuronId> {
        StreamLine::all()
            .into_iter()
            .map(|l| self.line(l))
            .collect()
    }
}

/// Sixteen two-bit cells addressed by two 2-control decoders, with
/// converging `nPiAns` / `PiAns` answer neurons.
pub fn build_draft_memory(
    circuit: &mut Circuit,
    pacemaker: &PacemakerHandle,
) -> Result<DraftMemoryHandle, BuildError> {
    check_memory_pacemaker(pacemaker)?;
    let dt = pacemaker.delta_t;
    let lag = COMMAND_LAG_PHASES * dt;

    let mut line = |l: StreamLine| circuit.add_port_neuron(&l.label());
    let data = (0..CODE_WIDTH as u8)
        .map(|i| line(StreamLine::Data(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let memorize = line(StreamLine::Memorize)?;
    let retrieve = line(StreamLine::Retrieve)?;
    let erase = line(StreamLine::Erase)?;
    let non_prime = line(StreamLine::NonPrime)?;
    let prime = line(StreamLine::Prime)?;

    let high = build_decoder_with_controls(circuit, pacemaker, &[data[2], data[3]], "DecHi")?;
    let low = build_decoder_with_controls(circuit, pacemaker, &[data[0], data[1]], "DecLo")?;
    tie_decoder_enable(circuit, pacemaker, &high)?;
    tie_decoder_enable(circuit, pacemaker, &low)?;

    let mut select = Vec::with_capacity(16);
    for k in 0..16 {
        let sel = circuit.add_port_neuron(&cell_label("Sel", k))?;
        circuit.connect(high.outputs[k >> 2], sel, 0.5, dt)?;
        circuit.connect(low.outputs[k & 3], sel, 0.5, dt)?;
        select.push(sel);
    }

    let non_prime_answer = circuit.add_port_neuron(NON_PRIME_ANSWER)?;
    let prime_answer = circuit.add_port_neuron(PRIME_ANSWER)?;
    let answers = [non_prime_answer, prime_answer];

    let mut cells = Vec::with_capacity(16);
    for (k, &sel) in select.iter().enumerate() {
        let cell = build_cell_core(circuit, pacemaker, 2, k)?;
        wire_cell_inputs(
            circuit,
            &cell,
            &CellInputs {
                select: (sel, dt),
                memorize: (memorize, lag),
                retrieve: (retrieve, lag),
                erase: (erase, lag),
                bits: vec![(non_prime, lag), (prime, lag)],
            },
        )?;
        for (&read, &answer) in cell.read_gates.iter().zip(&answers) {
            circuit.connect(read, answer, 1.0, dt)?;
        }
        cells.push(cell);
    }

    Ok(DraftMemoryHandle {
        pacemaker: pacemaker.clone(),
        data,
        memorize,
        retrieve,
        erase,
        non_prime,
        prime,
        high,
        low,
        select,
        cells,
        non_prime_answer,
        prime_answer,
    })
}

/// Draft memory geometry and neuron model for [`run_stream`].
#[derive(Clone, Debug, PartialEq)]
pub struct MemorySetup {
    pub spec: NeuronSpec,
    pub phases: usize,
    pub delta_t: u32,
}

impl Default for MemorySetup {
    fn default() -> Self {
        MemorySetup {
            spec: NeuronSpec::default(),
            phases: 5,
            delta_t: crate::engine::DEFAULT_DELTA_T,
        }
    }
}

pub struct StreamRun {
    pub circuit: Circuit,
    pub memory: DraftMemoryHandle,
    pub timing: PhaseTiming,
    pub raster: Raster,
}

/// Builds a draft memory, feeds it `ops` (one per cycle) and simulates until
/// one full period after the last transaction.
pub fn run_stream(
    setup: &MemorySetup,
    ops: &[StreamOp],
    scheme: CodeScheme,
    noise: NoiseConfig,
) -> Result<StreamRun, BuildError> {
    let mut circuit = Circuit::with_delta_t(setup.spec, setup.delta_t)?;
    let pacemaker = build_pacemaker(&mut circuit, setup.phases, setup.delta_t)?;
    let memory = build_draft_memory(&mut circuit, &pacemaker)?;
    let timing = pacemaker.timing;
    let spikes = compile_stream(ops, scheme, &timing)?;
    memory.schedule(&mut circuit, &spikes)?;
    let duration = timing.onset(ops.len(), 1) + 1;
    let raster = run(&circuit, duration, noise)?;
    Ok(StreamRun {
        circuit,
        memory,
        timing,
        raster,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::build_pacemaker;
    use crate::engine::{run, NeuronSpec, NoiseConfig};
    use crate::stream::{compile_stream, Attributes, CodeScheme, StreamOp};

    #[test]
    fn cell_index_is_binary() {
        assert_eq!(cell_index([false, true, false, true]), 5);
        assert_eq!(cell_index([false; 4]), 0);
        assert_eq!(cell_index([false, false, true, true]), 3);
        assert_eq!(cell_index([true; 4]), 15);
    }

    #[test]
    fn trapped_phase_bookkeeping() {
        // a on phases 1, 3, 5, then 2 (after b has taken phase 1)
        let five: Vec<_> = (0..4).map(|k| phase_of_trapped_spike(1, k, 5)).collect();
        assert_eq!(five, vec![1, 3, 5, 2]);
        let four: Vec<_> = (0..4).map(|k| phase_of_trapped_spike(1, k, 4)).collect();
        assert_eq!(four, vec![1, 3, 1, 3]);
        assert_eq!(phase_of_trapped_spike(4, 0, 5), 4);
    }

    #[test]
    fn memory_needs_four_phases() {
        let mut c = Circuit::new(NeuronSpec::lif()).unwrap();
        let pm = build_pacemaker(&mut c, 3, 20).unwrap();
        assert!(matches!(
            build_draft_memory(&mut c, &pm),
            Err(BuildError::PacemakerTooShort { needed: 4, got: 3 })
        ));
        assert!(matches!(
            build_memory_cell(&mut c, &pm, 1),
            Err(BuildError::PacemakerTooShort { .. })
        ));
    }

    #[test]
    fn cell_needs_a_bit() {
        let mut c = Circuit::new(NeuronSpec::lif()).unwrap();
        let pm = build_pacemaker(&mut c, 5, 20).unwrap();
        assert_eq!(
            build_memory_cell(&mut c, &pm, 0).unwrap_err(),
            BuildError::NoBits
        );
    }

    #[test]
    fn store_five_lights_cell_five() {
        let mut c = Circuit::new(NeuronSpec::lif()).unwrap();
        let pm = build_pacemaker(&mut c, 5, 20).unwrap();
        let dm = build_draft_memory(&mut c, &pm).unwrap();
        let ops = [StreamOp::store(5, Attributes::PRIME), StreamOp::retrieve(5)];
        let spikes = compile_stream(&ops, CodeScheme::Binary, &pm.timing).unwrap();
        dm.schedule(&mut c, &spikes).unwrap();
        let r = run(&c, 400, NoiseConfig::none()).unwrap();

        assert_eq!(r.spike_times(dm.select[5]), &[41, 141]);
        let act = dm.cells[5].activity(&r, 200..400);
        assert_eq!(
            act,
            CellActivity {
                kernel: true,
                bits: vec![false, true]
            }
        );
        for k in (0..16).filter(|&k| k != 5) {
            assert!(dm.cells[k]
                .neurons()
                .iter()
                .all(|&n| r.spike_times(n).is_empty()));
        }
        assert_eq!(r.spike_times(dm.prime_answer), &[181]);
        assert!(r.spike_times(dm.non_prime_answer).is_empty());
    }
}
