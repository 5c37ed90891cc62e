//! Exhaustive simulation of selector, decoder and function-generator blocks
//! against their Boolean truth functions, one combination per pacemaker cycle.

use std::fmt;

use crate::blocks::{
    build_decoder, build_pacemaker, build_selector, configure_function_generator, PacemakerHandle,
};
use crate::engine::{run, Circuit, NeuronId, NeuronSpec, NoiseConfig, PhaseTiming, Raster};
use crate::error::BuildError;
use crate::oracle::{decoder_truth, selector_truth};

/// Pacemaker used by the harness.
const PHASES: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthRow {
    /// Controls S_0.. followed by the data inputs.
    pub inputs: Vec<bool>,
    pub expected: Vec<bool>,
    /// Output spikes exactly on the output phase.
    pub observed: Vec<bool>,
    /// Output spikes in the cycle that missed the output phase.
    pub stray: usize,
}

impl TruthRow {
    pub fn matches(&self) -> bool {
        self.expected == self.observed && self.stray == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthReport {
    pub block: String,
    pub omega: usize,
    pub rows: Vec<TruthRow>,
}

impl TruthReport {
    pub fn matched(&self) -> usize {
        self.rows.iter().filter(|r| r.matches()).count()
    }

    pub fn all_match(&self) -> bool {
        self.matched() == self.rows.len()
    }
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl fmt::Display for TruthReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} omega={}", self.block, self.omega)?;
        writeln!(f, "controls inputs expected observed result")?;
        for row in &self.rows {
            let (s, i) = row.inputs.split_at(self.omega);
            writeln!(
                f,
                "{} {} {} {} {}",
                bits(s),
                bits(i),
                bits(&row.expected),
                bits(&row.observed),
                if row.matches() { "PASS" } else { "FAIL" }
            )?;
        }
        write!(f, "{}/{} match", self.matched(), self.rows.len())
    }
}

fn unpack(code: usize, width: usize) -> Vec<bool> {
    (0..width).map(|b| code >> b & 1 == 1).collect()
}

struct Harness {
    circuit: Circuit,
    timing: PhaseTiming,
}

impl Harness {
    fn new(spec: NeuronSpec, delta_t: u32) -> Result<(Self, PacemakerHandle), BuildError> {
        let mut circuit = Circuit::with_delta_t(spec, delta_t)?;
        let pm = build_pacemaker(&mut circuit, PHASES, delta_t)?;
        let timing = pm.timing;
        Ok((Harness { circuit, timing }, pm))
    }

    fn drive(
        &mut self,
        cycle: usize,
        neurons: &[NeuronId],
        levels: &[bool],
    ) -> Result<(), BuildError> {
        let t = self.timing.onset(cycle, 1);
        for (&n, _) in neurons.iter().zip(levels).filter(|(_, &on)| on) {
            self.circuit.schedule_external_spike(n, t)?;
        }
        Ok(())
    }

    fn simulate(&self, cycles: usize, noise: NoiseConfig) -> Result<Raster, BuildError> {
        Ok(run(&self.circuit, self.timing.onset(cycles, 1), noise)?)
    }

    fn observe(
        &self,
        raster: &Raster,
        cycle: usize,
        phase: usize,
        outputs: &[NeuronId],
    ) -> (Vec<bool>, usize) {
        let at = self.timing.onset(cycle, phase);
        let window = self.timing.onset(cycle, 1)..self.timing.onset(cycle + 1, 1);
        let mut stray = 0;
        let observed = outputs
            .iter()
            .map(|&y| {
                let spikes = raster.spikes_in(y, window.clone());
                stray += spikes.iter().filter(|&&t| t != at).count();
                spikes.contains(&at)
            })
            .collect();
        (observed, stray)
    }
}

/// All `2^omega * 2^(2^omega)` selector combinations; output checked on phase 3.
pub fn selector_truth_table(
    spec: NeuronSpec,
    omega: usize,
    delta_t: u32,
    noise: NoiseConfig,
) -> Result<TruthReport, BuildError> {
    let (mut h, pm) = Harness::new(spec, delta_t)?;
    let sel = build_selector(&mut h.circuit, &pm, omega)?;
    let width = omega + (1 << omega);
    let combos = 1usize << width;
    for c in 0..combos {
        let v = unpack(c, width);
        h.drive(c, &sel.controls, &v[..omega])?;
        h.drive(c, &sel.inputs, &v[omega..])?;
    }
    let raster = h.simulate(combos, noise)?;
    let rows = (0..combos)
        .map(|c| {
            let v = unpack(c, width);
            let expected = vec![selector_truth(&v[..omega], &v[omega..])];
            let (observed, stray) = h.observe(&raster, c, 3, &[sel.output]);
            TruthRow {
                inputs: v,
                expected,
                observed,
                stray,
            }
        })
        .collect();
    Ok(TruthReport {
        block: "selector".into(),
        omega,
        rows,
    })
}

/// All `2^(omega+1)` decoder combinations; outputs checked on phase 2.
pub fn decoder_truth_table(
    spec: NeuronSpec,
    omega: usize,
    delta_t: u32,
    noise: NoiseConfig,
) -> Result<TruthReport, BuildError> {
    let (mut h, pm) = Harness::new(spec, delta_t)?;
    let dec = build_decoder(&mut h.circuit, &pm, omega)?;
    let width = omega + 1;
    let combos = 1usize << width;
    for c in 0..combos {
        let v = unpack(c, width);
        h.drive(c, &dec.controls, &v[..omega])?;
        h.drive(c, &[dec.input], &v[omega..])?;
    }
    let raster = h.simulate(combos, noise)?;
    let rows = (0..combos)
        .map(|c| {
            let v = unpack(c, width);
            let expected = decoder_truth(&v[..omega], v[omega]);
            let (observed, stray) = h.observe(&raster, c, 2, &dec.outputs);
            TruthRow {
                inputs: v,
                expected,
                observed,
                stray,
            }
        })
        .collect();
    Ok(TruthReport {
        block: "decoder".into(),
        omega,
        rows,
    })
}

/// A two-control selector with inputs tied to `table` (indexed by S1S0 in
/// binary), evaluated on all four control combinations.
pub fn function_generator_table(
    spec: NeuronSpec,
    table: [bool; 4],
    delta_t: u32,
    noise: NoiseConfig,
) -> Result<TruthReport, BuildError> {
    let (mut h, pm) = Harness::new(spec, delta_t)?;
    let sel = build_selector(&mut h.circuit, &pm, 2)?;
    configure_function_generator(&mut h.circuit, &pm, &sel, &table)?;
    for c in 0..4 {
        h.drive(c, &sel.controls, &unpack(c, 2))?;
    }
    let raster = h.simulate(4, noise)?;
    let rows = (0..4)
        .map(|c| {
            let (observed, stray) = h.observe(&raster, c, 3, &[sel.output]);
            TruthRow {
                inputs: unpack(c, 2),
                expected: vec![table[c]],
                observed,
                stray,
            }
        })
        .collect();
    Ok(TruthReport {
        block: format!("function {}", bits(&table)),
        omega: 2,
        rows,
    })
}
