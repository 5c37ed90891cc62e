//! Reference models that simulated rasters are checked against.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use crate::engine::{NeuronId, PhaseTiming, Raster};
use crate::memory::{cell_index, NON_PRIME_ANSWER, PRIME_ANSWER};
use crate::stream::{encode_value, transaction_onset, Attributes, CodeScheme, Operation, StreamOp};

/// Selector output: the OR over all minterms of the controls, each gated by
/// its input. `s[i]` is S_i and `i[j]` is I_j.
pub fn selector_truth(s: &[bool], i: &[bool]) -> bool {
    assert_eq!(i.len(), 1 << s.len(), "need 2^|s| inputs");
    (0..i.len()).any(|j| {
        let minterm = s
            .iter()
            .enumerate()
            .all(|(bit, &sb)| if (j >> bit) & 1 == 1 { sb } else { !sb });
        minterm && i[j]
    })
}

/// Decoder outputs Y_0..Y_(2^|s|-1): the minterm selected by `s` carries
/// `input`, all others stay low.
pub fn decoder_truth(s: &[bool], input: bool) -> Vec<bool> {
    (0..1usize << s.len())
        .map(|j| {
            input
                && s.iter()
                    .enumerate()
                    .all(|(bit, &sb)| if (j >> bit) & 1 == 1 { sb } else { !sb })
        })
        .collect()
}

/// Trial division.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Cell index -> stored attributes. An absent entry is an empty cell.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RefMemory {
    cells: BTreeMap<usize, Attributes>,
}

impl RefMemory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, cell: usize) -> Option<Attributes> {
        self.cells.get(&cell).copied()
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, Attributes)> + '_ {
        self.cells.iter().map(|(k, v)| (*k, *v))
    }

    /// Applies one transaction. Retrieves return the stored attributes
    /// (`Some(Attributes::NONE)` for an empty cell); other operations
    /// return `None`.
    pub fn apply(&mut self, op: &StreamOp, scheme: CodeScheme) -> Option<Attributes> {
        let bits = encode_value(op.value as u32, scheme).expect("validated op");
        let cell = cell_index(bits);
        match op.op {
            Operation::Store => {
                self.cells
                    .insert(cell, op.attributes.unwrap_or(Attributes::NONE));
                None
            }
            Operation::Erase => {
                self.cells.remove(&cell);
                None
            }
            Operation::Retrieve => Some(self.get(cell).unwrap_or(Attributes::NONE)),
        }
    }
}

/// Functional form of [`RefMemory::apply`].
pub fn ref_apply(
    memory: &RefMemory,
    op: &StreamOp,
    scheme: CodeScheme,
) -> (RefMemory, Option<Attributes>) {
    let mut next = memory.clone();
    let answer = next.apply(op, scheme);
    (next, answer)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transaction {
    pub index: usize,
    pub op: StreamOp,
    pub onset_ms: u64,
    /// Answer expected for a retrieve; `None` means the answer neurons must
    /// stay silent.
    pub expected: Option<Attributes>,
}

/// Expected answers of a stream. `retrievals` indexes the retrieve
/// transactions, one entry each.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnswerTimeline {
    pub transactions: Vec<Transaction>,
    pub retrievals: Vec<usize>,
}

impl AnswerTimeline {
    pub fn build(ops: &[StreamOp], scheme: CodeScheme, timing: &PhaseTiming) -> Self {
        let mut memory = RefMemory::new();
        let mut timeline = AnswerTimeline::default();
        for (index, op) in ops.iter().enumerate() {
            let expected = memory.apply(op, scheme);
            if op.op == Operation::Retrieve {
                timeline.retrievals.push(index);
            }
            timeline.transactions.push(Transaction {
                index,
                op: *op,
                onset_ms: transaction_onset(timing, index),
                expected,
            });
        }
        timeline
    }

    /// `(transaction index, expected answer)` for every retrieve.
    pub fn expected_answers(&self) -> Vec<(usize, Attributes)> {
        self.retrievals
            .iter()
            .map(|&i| (i, self.transactions[i].expected.unwrap_or_default()))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportLine {
    pub index: usize,
    pub op: StreamOp,
    pub expected: Option<Attributes>,
    pub observed: Attributes,
    pub pass: bool,
}

impl fmt::Display for ReportLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let expected = match self.expected {
            Some(a) => a.to_string(),
            None => "quiet".into(),
        };
        let observed = if self.expected.is_none() && self.observed == Attributes::NONE {
            "quiet".to_string()
        } else {
            self.observed.to_string()
        };
        write!(
            f,
            "{:>3}  {:<18} expected={:<6} observed={:<6} {}",
            self.index,
            self.op.to_string(),
            expected,
            observed,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub lines: Vec<ReportLine>,
    /// Answer spikes that fall outside every transaction window.
    pub stray: Vec<(u64, String)>,
}

impl Report {
    pub fn mismatches(&self) -> usize {
        self.lines.iter().filter(|l| !l.pass).count() + self.stray.len()
    }

    pub fn is_clean(&self) -> bool {
        self.mismatches() == 0
    }

    /// Fraction of transactions that passed; 1.0 for an empty report.
    pub fn pass_rate(&self) -> f64 {
        if self.lines.is_empty() {
            return if self.stray.is_empty() { 1.0 } else { 0.0 };
        }
        let passed = self.lines.iter().filter(|l| l.pass).count();
        passed as f64 / (self.lines.len() + self.stray.len()) as f64
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        for (t, label) in &self.stray {
            writeln!(f, "  -  stray {label} spike at {t} ms FAIL")?;
        }
        writeln!(
            f,
            "# {} transactions, {} mismatches",
            self.lines.len(),
            self.mismatches()
        )
    }
}

/// Window `(onset, onset + window_ms]` in which a transaction's answer is
/// read.
pub fn answer_window(onset_ms: u64, window_ms: u64) -> Range<u64> {
    onset_ms + 1..onset_ms + window_ms + 1
}

/// Checks the `nPiAns`/`PiAns` spikes of `raster` against `timeline`.
///
/// Every transaction owns the answer window that starts at its phase-1
/// onset. Retrieves must produce exactly the expected answer neurons there;
/// other transactions must leave both silent. Spikes outside all windows are
/// reported as stray.
pub fn compare_answers(raster: &Raster, timeline: &AnswerTimeline, window_ms: u64) -> Report {
    let find = |label: &str| raster.find_label(label);
    let non_prime = find(NON_PRIME_ANSWER);
    let prime = find(PRIME_ANSWER);
    let fired = |id: Option<NeuronId>, w: Range<u64>| id.is_some_and(|id| raster.fired_in(id, w));

    let mut report = Report::default();
    let mut covered: Vec<Range<u64>> = Vec::new();
    for t in &timeline.transactions {
        let window = answer_window(t.onset_ms, window_ms);
        let observed = Attributes {
            non_prime: fired(non_prime, window.clone()),
            prime: fired(prime, window.clone()),
        };
        let pass = observed == t.expected.unwrap_or_default();
        covered.push(window);
        report.lines.push(ReportLine {
            index: t.index,
            op: t.op,
            expected: t.expected,
            observed,
            pass,
        });
    }
    for (id, label) in [(non_prime, NON_PRIME_ANSWER), (prime, PRIME_ANSWER)] {
        let Some(id) = id else { continue };
        for &time in raster.spike_times(id) {
            if !covered.iter().any(|w| w.contains(&time)) {
                report.stray.push((time, label.to_string()));
            }
        }
    }
    report.stray.sort();
    report
}
