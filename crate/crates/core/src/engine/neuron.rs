//! Point-neuron models advanced in 1 ms ticks.
//!
//! Two models are available: a leaky integrate-and-fire neuron and the
//! quadratic two-variable "simple model" of Izhikevich. Synaptic input is
//! delivered as a current that is held for exactly one tick.

use crate::error::EngineError;

/// Membrane voltage at which a simple-model spike is registered (mV).
pub const SIMPLE_MODEL_PEAK: f64 = 30.0;

/// Ticks after the input tick during which calibration accepts a spike.
const CALIBRATION_WINDOW: usize = 2;
const CALIBRATION_ITERATIONS: usize = 200;
const CALIBRATION_MAX_DOUBLINGS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimpleModelParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Default for SimpleModelParams {
    /// Regular-spiking cortical cell.
    fn default() -> Self {
        Self {
            a: 0.02,
            b: 0.2,
            c: -65.0,
            d: 8.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LifParams {
    /// Membrane time constant (ms).
    pub tau_ms: f64,
    pub v_rest: f64,
    pub v_threshold: f64,
    pub v_reset: f64,
}

impl Default for LifParams {
    fn default() -> Self {
        Self {
            tau_ms: 10.0,
            v_rest: -65.0,
            v_threshold: -50.0,
            v_reset: -65.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NeuronSpec {
    SimpleModel(SimpleModelParams),
    Lif(LifParams),
}

impl Default for NeuronSpec {
    fn default() -> Self {
        NeuronSpec::Lif(LifParams::default())
    }
}

impl NeuronSpec {
    pub fn simple_model() -> Self {
        NeuronSpec::SimpleModel(SimpleModelParams::default())
    }

    pub fn lif() -> Self {
        NeuronSpec::Lif(LifParams::default())
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let finite = match self {
            NeuronSpec::SimpleModel(p) => [p.a, p.b, p.c, p.d].iter().all(|x| x.is_finite()),
            NeuronSpec::Lif(p) => [p.tau_ms, p.v_rest, p.v_threshold, p.v_reset]
                .iter()
                .all(|x| x.is_finite()),
        };
        if !finite {
            return Err(EngineError::InvalidNeuron(
                "parameters must be finite".into(),
            ));
        }
        if let NeuronSpec::Lif(p) = self {
            if p.v_threshold <= p.v_reset {
                return Err(EngineError::InvalidNeuron(
                    "LIF threshold must lie above the reset potential".into(),
                ));
            }
            if p.tau_ms < 1.0 {
                return Err(EngineError::InvalidNeuron(
                    "LIF time constant must be at least one tick".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Membrane variables of one neuron. `u` is unused by the LIF model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeuronState {
    pub v: f64,
    pub u: f64,
}

impl NeuronState {
    /// Resting equilibrium of the model.
    ///
    /// For the simple model this is the stable root of
    /// `0.04 v^2 + (5 - b) v + 140 = 0` with `u = b v`. Parameter sets that
    /// have no resting state (tonically active cells) start from `(c, b c)`.
    pub fn resting(spec: &NeuronSpec) -> Self {
        match spec {
            NeuronSpec::Lif(p) => NeuronState {
                v: p.v_rest,
                u: 0.0,
            },
            NeuronSpec::SimpleModel(p) => {
                let lin = 5.0 - p.b;
                let disc = lin * lin - 4.0 * 0.04 * 140.0;
                let v = if disc >= 0.0 {
                    (-lin - disc.sqrt()) / (2.0 * 0.04)
                } else {
                    p.c
                };
                NeuronState { v, u: p.b * v }
            }
        }
    }

    /// Values the state takes right after a spike.
    fn reset(&mut self, spec: &NeuronSpec) {
        match spec {
            NeuronSpec::Lif(p) => self.v = p.v_reset,
            NeuronSpec::SimpleModel(p) => {
                self.v = p.c;
                self.u += p.d;
            }
        }
    }

    /// Integrates one 1 ms tick with `current` held constant and reports
    /// whether the neuron spiked.
    pub fn advance(&mut self, spec: &NeuronSpec, current: f64) -> bool {
        let fired = match spec {
            NeuronSpec::Lif(p) => {
                self.v += (-(self.v - p.v_rest) + current) / p.tau_ms;
                self.v >= p.v_threshold
            }
            NeuronSpec::SimpleModel(p) => {
                // two half-steps on v for numerical stability
                for _ in 0..2 {
                    self.v +=
                        0.5 * (0.04 * self.v * self.v + 5.0 * self.v + 140.0 - self.u + current);
                }
                self.u += p.a * (p.b * self.v - self.u);
                self.v >= SIMPLE_MODEL_PEAK
            }
        };
        if !self.v.is_finite() || !self.u.is_finite() {
            log::warn!(
                "membrane state diverged (v={}, u={}); clamping to reset",
                self.v,
                self.u
            );
            *self = NeuronState::resting(spec);
            self.reset(spec);
            return false;
        }
        if fired {
            self.reset(spec);
        }
        fired
    }
}

/// Whether a neuron at rest spikes within the calibration window after a
/// single-tick pulse of `current`.
pub fn fires_from_rest(spec: &NeuronSpec, current: f64) -> bool {
    let mut state = NeuronState::resting(spec);
    (0..CALIBRATION_WINDOW).any(|tick| state.advance(spec, if tick == 0 { current } else { 0.0 }))
}

/// Smallest single-tick current that makes a resting neuron spike within
/// 2 ms, located by bisection.
pub fn calibrate_theta(spec: &NeuronSpec) -> Result<f64, EngineError> {
    spec.validate()?;
    let mut low = 0.0;
    let mut high = 1.0;
    let mut doublings = 0;
    while !fires_from_rest(spec, high) {
        low = high;
        high *= 2.0;
        doublings += 1;
        if doublings > CALIBRATION_MAX_DOUBLINGS {
            return Err(EngineError::Calibration(format!(
                "no spike for currents up to {high:e}"
            )));
        }
    }
    for _ in 0..CALIBRATION_ITERATIONS {
        let mid = 0.5 * (low + high);
        if mid <= low || mid >= high {
            break;
        }
        if fires_from_rest(spec, mid) {
            high = mid;
        } else {
            low = mid;
        }
    }
    if high - low > 1e-9 * high {
        return Err(EngineError::Calibration(format!(
            "bisection bracket [{low}, {high}] did not close"
        )));
    }
    Ok(high)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input_never_spikes() {
        for spec in [NeuronSpec::lif(), NeuronSpec::simple_model()] {
            let mut s = NeuronState::resting(&spec);
            assert!((0..1000).all(|_| !s.advance(&spec, 0.0)));
        }
    }

    #[test]
    fn reset_values_after_spike() {
        let spec = NeuronSpec::lif();
        let mut s = NeuronState::resting(&spec);
        assert!(s.advance(&spec, 1000.0));
        assert_eq!(s.v, -65.0);

        let spec = NeuronSpec::simple_model();
        let mut s = NeuronState::resting(&spec);
        let u_before = s.u;
        assert!(s.advance(&spec, 1000.0));
        assert_eq!(s.v, -65.0);
        // u moved by one tick of recovery and then jumped by d
        assert!(s.u > u_before + 7.0);
    }

    #[test]
    fn simple_model_rest_is_equilibrium() {
        let spec = NeuronSpec::simple_model();
        let rest = NeuronState::resting(&spec);
        assert!((rest.v + 70.0).abs() < 1e-9);
        let mut s = rest;
        s.advance(&spec, 0.0);
        assert!((s.v - rest.v).abs() < 1e-9 && (s.u - rest.u).abs() < 1e-9);
    }

    #[test]
    fn invalid_lif_rejected() {
        let spec = NeuronSpec::Lif(LifParams {
            v_threshold: -70.0,
            ..LifParams::default()
        });
        assert!(matches!(
            calibrate_theta(&spec),
            Err(EngineError::InvalidNeuron(_))
        ));
        let spec = NeuronSpec::SimpleModel(SimpleModelParams {
            a: f64::NAN,
            ..SimpleModelParams::default()
        });
        assert!(spec.validate().is_err());
    }

    #[test]
    fn divergence_clamps_to_reset() {
        let spec = NeuronSpec::simple_model();
        let mut s = NeuronState::resting(&spec);
        assert!(!s.advance(&spec, f64::INFINITY));
        assert_eq!(s.v, -65.0);
    }
}
