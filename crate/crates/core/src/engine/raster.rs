use std::io::Write;
use std::ops::Range;

use super::circuit::NeuronId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SpikeEvent {
    pub time_ms: u64,
    pub neuron: NeuronId,
}

/// Recorded spikes ordered by time, then neuron id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    events: Vec<SpikeEvent>,
    labels: Vec<String>,
    by_neuron: Vec<Vec<u64>>,
    duration_ms: u64,
}

impl Raster {
    pub fn new(labels: Vec<String>) -> Self {
        let by_neuron = vec![Vec::new(); labels.len()];
        Raster {
            events: Vec::new(),
            labels,
            by_neuron,
            duration_ms: 0,
        }
    }

    /// Appends a spike. Events must arrive in (time, id) order.
    pub(crate) fn push(&mut self, event: SpikeEvent) {
        debug_assert!(self.events.last().is_none_or(|last| *last < event));
        self.by_neuron[event.neuron.index()].push(event.time_ms);
        self.events.push(event);
    }

    pub(crate) fn set_duration(&mut self, duration_ms: u64) {
        self.duration_ms = duration_ms;
    }

    /// Simulated time covered by the recording.
    pub fn duration_ms(&self) -> u64 {
        self.duration_ms
    }

    pub fn events(&self) -> &[SpikeEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, id: NeuronId) -> &str {
        &self.labels[id.index()]
    }

    pub fn find_label(&self, label: &str) -> Option<NeuronId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| NeuronId(i as u32))
    }

    pub fn spike_times(&self, id: NeuronId) -> &[u64] {
        &self.by_neuron[id.index()]
    }

    /// Spike times of `id` inside `window`.
    pub fn spikes_in(&self, id: NeuronId, window: Range<u64>) -> &[u64] {
        let times = self.spike_times(id);
        let lo = times.partition_point(|&t| t < window.start);
        let hi = times.partition_point(|&t| t < window.end);
        &times[lo..hi]
    }

    pub fn fired_in(&self, id: NeuronId, window: Range<u64>) -> bool {
        !self.spikes_in(id, window).is_empty()
    }

    /// Writes `time_ms,neuron_id,label` rows under a header line.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["time_ms", "neuron_id", "label"])?;
        for e in &self.events {
            out.write_record([
                e.time_ms.to_string(),
                e.neuron.to_string(),
                self.labels[e.neuron.index()].clone(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("labels are utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout_and_window_queries() {
        let mut r = Raster::new(vec!["P1".into(), "Y".into()]);
        r.push(SpikeEvent {
            time_ms: 1,
            neuron: NeuronId(0),
        });
        r.push(SpikeEvent {
            time_ms: 41,
            neuron: NeuronId(1),
        });
        r.push(SpikeEvent {
            time_ms: 101,
            neuron: NeuronId(0),
        });
        assert_eq!(
            r.to_csv_string(),
            "time_ms,neuron_id,label\n1,0,P1\n41,1,Y\n101,0,P1\n"
        );
        assert_eq!(r.spikes_in(NeuronId(0), 0..101), &[1]);
        assert!(r.fired_in(NeuronId(1), 41..42));
        assert!(!r.fired_in(NeuronId(1), 42..200));
        assert_eq!(r.find_label("Y"), Some(NeuronId(1)));
    }
}
